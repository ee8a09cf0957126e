//! Data model and file ingestion for statement pairs and their external
//! linguistic annotations.
//!
//! Annotations (segmentation, POS, named entities, parses, dependencies) are
//! inputs produced by outside tools; this module only loads, joins, and
//! validates them.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tree::{self, TreeNode};

/// Binary entailment label: Y means "T entails H".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Y,
    N,
}

impl Label {
    pub fn flip(self) -> Label {
        match self {
            Label::Y => Label::N,
            Label::N => Label::Y,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Y => "Y",
            Label::N => "N",
        })
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "Y" => Ok(Label::Y),
            "N" => Ok(Label::N),
            _ => Err(()),
        }
    }
}

/// One segmented word with its POS tag and 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub pos: String,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeCategory {
    Person,
    Location,
    Organization,
    Time,
    Other,
}

impl fmt::Display for NeCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NeCategory::Person => "PERSON",
            NeCategory::Location => "LOCATION",
            NeCategory::Organization => "ORGANIZATION",
            NeCategory::Time => "TIME",
            NeCategory::Other => "OTHER",
        })
    }
}

impl FromStr for NeCategory {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "PERSON" => Ok(NeCategory::Person),
            "LOCATION" => Ok(NeCategory::Location),
            "ORGANIZATION" => Ok(NeCategory::Organization),
            "TIME" => Ok(NeCategory::Time),
            "OTHER" => Ok(NeCategory::Other),
            _ => Err(()),
        }
    }
}

/// Named-entity span over token positions, inclusive on both ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeSpan {
    pub category: NeCategory,
    pub start: usize,
    pub end: usize,
}

/// One dependency edge. `governor` 0 denotes ROOT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepEdge {
    pub relation: String,
    pub governor: usize,
    pub dependent: usize,
}

/// Constituency node; an empty child list marks a leaf whose label is the
/// token surface.
pub type ParseNode = TreeNode;

/// One statement with whatever annotations the input files supplied.
/// Missing parse or dependencies are allowed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotatedStatement {
    pub id: String,
    pub raw: String,
    pub tokens: Vec<Token>,
    pub ne_spans: Vec<NeSpan>,
    pub parse: Option<ParseNode>,
    pub deps: Vec<DepEdge>,
}

impl AnnotatedStatement {
    pub fn new(id: impl Into<String>, raw: impl Into<String>) -> Self {
        AnnotatedStatement {
            id: id.into(),
            raw: raw.into(),
            ..Default::default()
        }
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }
}

/// A (T, H) statement pair with an optional gold label.
#[derive(Debug, Clone, PartialEq)]
pub struct StatementPair {
    pub id: String,
    pub t: AnnotatedStatement,
    pub h: AnnotatedStatement,
    pub gold: Option<Label>,
}

/// Reads a pair file: one record per line, tab-separated
/// `id ⟨tab⟩ label(Y|N|-) ⟨tab⟩ T-text ⟨tab⟩ H-text`.
pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<StatementPair>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_number = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::format(
                path,
                line_number,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let id = fields[0].trim();
        if id.is_empty() {
            return Err(Error::format(path, line_number, "empty pair id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId {
                id: id.to_string(),
                line: line_number,
            });
        }
        let gold = match fields[1] {
            "-" => None,
            s => Some(
                s.parse::<Label>()
                    .map_err(|_| Error::InvalidLabel { line: line_number })?,
            ),
        };
        pairs.push(StatementPair {
            id: id.to_string(),
            t: AnnotatedStatement::new(format!("{id}.t"), fields[2]),
            h: AnnotatedStatement::new(format!("{id}.h"), fields[3]),
            gold,
        });
    }
    Ok(pairs)
}

/// Inverse of [`load_pairs`] for the id/label/text fields. Fields holding a
/// tab or newline are not representable in the line format and are rejected
/// rather than written corrupt.
pub fn write_pairs(path: impl AsRef<Path>, pairs: &[StatementPair]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for p in pairs {
        for field in [&p.id, &p.t.raw, &p.h.raw] {
            if field.contains('\t') || field.contains('\n') {
                return Err(Error::Config(format!(
                    "pair `{}`: field contains a tab or newline and cannot be written",
                    p.id
                )));
            }
        }
        let label = p.gold.map_or("-".to_string(), |l| l.to_string());
        out.push_str(&format!("{}\t{}\t{}\t{}\n", p.id, label, p.t.raw, p.h.raw));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Default)]
struct AnnotationBlock {
    tokens: Vec<Token>,
    deps: Vec<DepEdge>,
    ne_spans: Vec<NeSpan>,
    parse: Option<ParseNode>,
}

/// Attaches annotation blocks to pair statements, joining on
/// `<pairid>.t` / `<pairid>.h` ids.
///
/// Returns the annotated pairs plus a warning per block whose id matches no
/// statement. Out-of-range token indices are errors.
pub fn attach_annotations(
    pairs: Vec<StatementPair>,
    path: impl AsRef<Path>,
) -> Result<(Vec<StatementPair>, Vec<String>)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let blocks = parse_annotation_file(path, &text)?;

    let mut pairs = pairs;
    let mut index: HashMap<String, (usize, bool)> = HashMap::new();
    for (i, p) in pairs.iter().enumerate() {
        index.insert(p.t.id.clone(), (i, true));
        index.insert(p.h.id.clone(), (i, false));
    }

    let mut warnings = Vec::new();
    for (id, block) in blocks {
        match index.get(&id) {
            None => warnings.push(format!("annotation block `{id}` matches no statement")),
            Some(&(i, is_t)) => {
                let stmt = if is_t { &mut pairs[i].t } else { &mut pairs[i].h };
                let n = block.tokens.len();
                for d in &block.deps {
                    if d.dependent == 0 || d.dependent > n || d.governor > n {
                        return Err(Error::IndexOutOfRange {
                            id: id.clone(),
                            index: d.dependent.max(d.governor),
                            len: n,
                        });
                    }
                }
                for ne in &block.ne_spans {
                    if ne.start == 0 || ne.end > n || ne.start > ne.end {
                        return Err(Error::IndexOutOfRange {
                            id: id.clone(),
                            index: ne.end.max(ne.start),
                            len: n,
                        });
                    }
                }
                stmt.tokens = block.tokens;
                stmt.deps = block.deps;
                stmt.ne_spans = block.ne_spans;
                stmt.parse = block.parse;
            }
        }
    }
    Ok((pairs, warnings))
}

/// Parses the block format:
///
/// ```text
/// #id p1.t
/// 1⟨tab⟩surface⟨tab⟩POS⟨tab⟩governor⟨tab⟩relation
/// …
/// #ne PERSON 1 2
/// #tree (S (NP 甲) (VP 乙))
/// <blank line>
/// ```
///
/// Governor 0 means ROOT; `_` means the token carries no dependency info.
fn parse_annotation_file(path: &Path, text: &str) -> Result<Vec<(String, AnnotationBlock)>> {
    let mut blocks: Vec<(String, AnnotationBlock)> = Vec::new();
    let mut current: Option<(String, AnnotationBlock)> = None;

    for (lineno, line) in text.lines().enumerate() {
        let line_number = lineno + 1;
        let trimmed = line.trim_end();
        if trimmed.trim().is_empty() {
            if let Some(done) = current.take() {
                blocks.push(done);
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("#id ") {
            if let Some(done) = current.take() {
                blocks.push(done);
            }
            let id = rest.trim();
            if id.is_empty() {
                return Err(Error::format(path, line_number, "empty statement id"));
            }
            current = Some((id.to_string(), AnnotationBlock::default()));
            continue;
        }
        let Some((_, block)) = current.as_mut() else {
            return Err(Error::format(
                path,
                line_number,
                "content before any `#id` header",
            ));
        };
        if let Some(rest) = trimmed.strip_prefix("#ne ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::format(
                    path,
                    line_number,
                    "expected `#ne category start end`",
                ));
            }
            let category = parts[0].parse::<NeCategory>().map_err(|_| {
                Error::format(path, line_number, format!("unknown NE category `{}`", parts[0]))
            })?;
            let start = parse_usize(path, line_number, parts[1])?;
            let end = parse_usize(path, line_number, parts[2])?;
            block.ne_spans.push(NeSpan {
                category,
                start,
                end,
            });
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("#tree ") {
            let parse = tree::parse(rest.trim())
                .map_err(|e| Error::format(path, line_number, e.to_string()))?;
            block.parse = Some(parse);
            continue;
        }
        // token line: index ⟨tab⟩ surface ⟨tab⟩ POS ⟨tab⟩ governor ⟨tab⟩ relation
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::format(
                path,
                line_number,
                format!("expected 5 tab-separated token fields, found {}", fields.len()),
            ));
        }
        let index = parse_usize(path, line_number, fields[0])?;
        let surface = fields[1].trim();
        if surface.is_empty() {
            return Err(Error::format(path, line_number, "empty token surface"));
        }
        if index != block.tokens.len() + 1 {
            return Err(Error::format(
                path,
                line_number,
                format!(
                    "token index {index} out of sequence (expected {})",
                    block.tokens.len() + 1
                ),
            ));
        }
        block.tokens.push(Token {
            surface: surface.to_string(),
            pos: fields[2].trim().to_string(),
            index,
        });
        if fields[3] != "_" {
            let governor = parse_usize(path, line_number, fields[3])?;
            block.deps.push(DepEdge {
                relation: fields[4].trim().to_string(),
                governor,
                dependent: index,
            });
        }
    }
    if let Some(done) = current.take() {
        blocks.push(done);
    }
    Ok(blocks)
}

fn parse_usize(path: &Path, line: usize, s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| Error::format(path, line, format!("expected a non-negative integer, found `{s}`")))
}

/// Checks every type invariant and returns one description per violation.
/// An empty list means the statement is well-formed.
pub fn validate(stmt: &AnnotatedStatement) -> Vec<String> {
    let mut violations = Vec::new();
    let n = stmt.tokens.len();

    for (i, tok) in stmt.tokens.iter().enumerate() {
        if tok.surface.is_empty() {
            violations.push(format!("token {} has an empty surface", i + 1));
        }
        if tok.index != i + 1 {
            violations.push(format!(
                "token at position {} carries index {} (must be consecutive from 1)",
                i + 1,
                tok.index
            ));
        }
    }

    for ne in &stmt.ne_spans {
        if ne.start == 0 || ne.start > ne.end || ne.end > n {
            violations.push(format!(
                "NE span {}..{} ({}) violates 1 ≤ start ≤ end ≤ {}",
                ne.start, ne.end, ne.category, n
            ));
        }
    }

    let mut seen_edges = HashSet::new();
    let mut root_edges = 0usize;
    for d in &stmt.deps {
        if d.dependent == 0 || d.dependent > n {
            violations.push(format!("dependency dependent {} out of range", d.dependent));
        }
        if d.governor > n {
            violations.push(format!("dependency governor {} out of range", d.governor));
        }
        if d.governor == d.dependent {
            violations.push(format!("dependency self-loop on token {}", d.dependent));
        }
        if !seen_edges.insert((d.governor, d.dependent)) {
            violations.push(format!(
                "duplicate dependency edge ({}, {})",
                d.governor, d.dependent
            ));
        }
        if d.governor == 0 {
            root_edges += 1;
        }
    }
    if root_edges > 1 {
        violations.push(format!("{root_edges} ROOT-governed edges (at most one allowed)"));
    }

    if let Some(parse) = &stmt.parse {
        let leaves = parse.leaves().len();
        if leaves != n {
            violations.push(format!(
                "parse tree has {leaves} leaves but the statement has {n} tokens"
            ));
        }
    }

    violations
}

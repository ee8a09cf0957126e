//! Feature registry and extraction: maps a statement pair plus lexical
//! resources to a named real-valued vector.
//!
//! Overlap ratios normalize by the hypothesis side, since the question is
//! whether H's content is covered by T. Structural features that cannot be
//! computed (missing parse or dependencies) take the spec's neutral value
//! instead of failing.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{AnnotatedStatement, Label, NeCategory, StatementPair};
use crate::error::{Error, Result};
use crate::lexicon::{
    self, AntonymLexicon, DefinitionLexicon, Multiset, NegationList, SynonymLexicon,
};
use crate::matching::max_bipartite;
use crate::normalize::{self, ExceptionList, NumeralGrammar};
use crate::structsim;

/// Bundle of the lexical resources extraction consults.
#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    pub synonyms: SynonymLexicon,
    pub antonyms: AntonymLexicon,
    pub negations: NegationList,
    pub definitions: DefinitionLexicon,
}

impl Lexicons {
    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        lexicon::are_synonyms(a, b, &self.synonyms, &self.definitions)
    }
}

pub const DEFAULT_NEUTRAL_VALUE: f64 = 0.5;

/// The fixed feature catalogue, in canonical order.
pub const REGISTRY: &[&str] = &[
    "char_overlap",
    "word_overlap",
    "word_overlap_syn",
    "len_t",
    "len_h",
    "len_ratio",
    "neg_t",
    "neg_h",
    "neg_parity",
    "antonym_count",
    "ne_overlap_person",
    "ne_overlap_location",
    "ne_overlap_organization",
    "ne_overlap_time",
    "verb_overlap",
    "parse_dice",
    "pos_dice",
    "dep_xr_dice",
    "number_mismatch",
];

/// Resolves registry names, including the `F8`/`F16` aliases for the parse
/// and dependency similarities.
pub fn resolve_feature_name(name: &str) -> Result<&'static str> {
    match name {
        "F8" | "f8" => Ok("parse_dice"),
        "F16" | "f16" => Ok("dep_xr_dice"),
        other => REGISTRY
            .iter()
            .find(|&&r| r == other)
            .copied()
            .ok_or_else(|| Error::UnknownFeature(other.to_string())),
    }
}

/// Which features to extract, in vector order, plus extraction options.
#[derive(Debug, Clone)]
pub struct FeatureSpec {
    pub enabled: Vec<String>,
    pub synonyms_on: bool,
    pub neutral_value: f64,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        FeatureSpec {
            enabled: REGISTRY.iter().map(|s| s.to_string()).collect(),
            synonyms_on: false,
            neutral_value: DEFAULT_NEUTRAL_VALUE,
        }
    }
}

impl FeatureSpec {
    pub fn with_features<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut enabled = Vec::new();
        for n in names {
            enabled.push(resolve_feature_name(n.as_ref())?.to_string());
        }
        Ok(FeatureSpec {
            enabled,
            ..Default::default()
        })
    }

    /// Loads one feature name per line, with `option synonyms=on|off` and
    /// `option neutral=<real>` lines and `#` comments.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut enabled = Vec::new();
        let mut synonyms_on = false;
        let mut neutral_value = DEFAULT_NEUTRAL_VALUE;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(option) = line.strip_prefix("option ") {
                let (key, value) = option.split_once('=').ok_or_else(|| {
                    Error::format(path, lineno + 1, "expected `option key=value`")
                })?;
                match (key.trim(), value.trim()) {
                    ("synonyms", "on") => synonyms_on = true,
                    ("synonyms", "off") => synonyms_on = false,
                    ("neutral", v) => {
                        neutral_value = v.parse().map_err(|_| {
                            Error::format(path, lineno + 1, format!("bad neutral value `{v}`"))
                        })?;
                    }
                    (k, v) => {
                        return Err(Error::format(
                            path,
                            lineno + 1,
                            format!("unknown option `{k}={v}`"),
                        ))
                    }
                }
                continue;
            }
            let resolved = resolve_feature_name(line)
                .map_err(|e| Error::format(path, lineno + 1, e.to_string()))?;
            enabled.push(resolved.to_string());
        }
        if enabled.is_empty() {
            return Err(Error::format(path, 0, "feature spec enables no features"));
        }
        Ok(FeatureSpec {
            enabled,
            synonyms_on,
            neutral_value,
        })
    }
}

/// Named real values in spec order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<(String, f64)>,
}

impl FeatureVector {
    pub fn from_pairs(values: Vec<(String, f64)>) -> Self {
        FeatureVector { values }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Extraction output for a whole dataset, row order matching pair order.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub ids: Vec<String>,
    pub vectors: Vec<FeatureVector>,
    pub labels: Vec<Option<Label>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Splits off the rows that carry gold labels.
    pub fn labeled(&self) -> (Vec<FeatureVector>, Vec<Label>) {
        let mut vs = Vec::new();
        let mut ls = Vec::new();
        for (v, l) in self.vectors.iter().zip(&self.labels) {
            if let Some(l) = l {
                vs.push(v.clone());
                ls.push(*l);
            }
        }
        (vs, ls)
    }
}

struct PairContext<'a> {
    pair: &'a StatementPair,
    lex: &'a Lexicons,
    spec: &'a FeatureSpec,
    grammar: NumeralGrammar,
    exceptions: ExceptionList,
}

/// Computes the enabled features for one pair. Pure and deterministic:
/// identical inputs give identical vectors bit for bit.
pub fn extract(pair: &StatementPair, lex: &Lexicons, spec: &FeatureSpec) -> FeatureVector {
    let ctx = PairContext {
        pair,
        lex,
        spec,
        grammar: NumeralGrammar::default(),
        exceptions: ExceptionList::default(),
    };
    let values = spec
        .enabled
        .iter()
        .map(|name| (name.clone(), ctx.compute(name)))
        .collect();
    FeatureVector::from_pairs(values)
}

/// Extracts every pair, fanning out over rows and reducing in input order.
pub fn extract_all(pairs: &[StatementPair], lex: &Lexicons, spec: &FeatureSpec) -> Dataset {
    let vectors: Vec<FeatureVector> = pairs
        .par_iter()
        .map(|p| extract(p, lex, spec))
        .collect();
    Dataset {
        ids: pairs.iter().map(|p| p.id.clone()).collect(),
        vectors,
        labels: pairs.iter().map(|p| p.gold).collect(),
    }
}

impl PairContext<'_> {
    fn compute(&self, name: &str) -> f64 {
        let t = &self.pair.t;
        let h = &self.pair.h;
        match name {
            "char_overlap" => self.char_overlap(t, h),
            "word_overlap" => self.word_overlap(t, h, false),
            "word_overlap_syn" => self.word_overlap(t, h, true),
            "len_t" => t.tokens.len() as f64,
            "len_h" => h.tokens.len() as f64,
            "len_ratio" => {
                let (a, b) = (t.tokens.len(), h.tokens.len());
                let (min, max) = (a.min(b), a.max(b));
                if max == 0 {
                    1.0
                } else {
                    min as f64 / max as f64
                }
            }
            "neg_t" => lexicon::count_negations(&t.tokens, &self.lex.negations) as f64,
            "neg_h" => lexicon::count_negations(&h.tokens, &self.lex.negations) as f64,
            "neg_parity" => {
                let nt = lexicon::count_negations(&t.tokens, &self.lex.negations) as i64;
                let nh = lexicon::count_negations(&h.tokens, &self.lex.negations) as i64;
                if (nt - nh) % 2 == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            "antonym_count" => {
                lexicon::antonym_hits(&t.tokens, &h.tokens, &self.lex.antonyms) as f64
            }
            "ne_overlap_person" => self.ne_overlap(t, h, NeCategory::Person),
            "ne_overlap_location" => self.ne_overlap(t, h, NeCategory::Location),
            "ne_overlap_organization" => self.ne_overlap(t, h, NeCategory::Organization),
            "ne_overlap_time" => self.ne_overlap(t, h, NeCategory::Time),
            "verb_overlap" => self.verb_overlap(t, h),
            "parse_dice" => match (&t.parse, &h.parse) {
                (Some(pt), Some(ph)) => structsim::tree_similarity(pt, ph),
                _ => self.spec.neutral_value,
            },
            "pos_dice" => structsim::pos_similarity(&t.tokens, &h.tokens, false)
                .unwrap_or(self.spec.neutral_value),
            "dep_xr_dice" => {
                let syn = |a: &str, b: &str| self.lex.are_synonyms(a, b);
                let oracle: Option<structsim::SynOracle> =
                    if self.spec.synonyms_on { Some(&syn) } else { None };
                structsim::dep_similarity(t, h, oracle).unwrap_or(self.spec.neutral_value)
            }
            "number_mismatch" => self.number_mismatch(t, h),
            other => unreachable!("unknown feature `{other}` got past the spec loader"),
        }
    }

    fn char_overlap(&self, t: &AnnotatedStatement, h: &AnnotatedStatement) -> f64 {
        let ct: Multiset<char> = t.raw.chars().collect();
        let ch: Multiset<char> = h.raw.chars().collect();
        if ch.total() == 0 {
            return self.spec.neutral_value;
        }
        ct.intersection_size(&ch) as f64 / ch.total() as f64
    }

    fn word_overlap(&self, t: &AnnotatedStatement, h: &AnnotatedStatement, syn: bool) -> f64 {
        if h.tokens.is_empty() {
            return self.spec.neutral_value;
        }
        let ts = t.surfaces();
        let hs = h.surfaces();
        let matched = if syn {
            max_bipartite(&ts, &hs, |a, b| self.lex.are_synonyms(a, b))
        } else {
            max_bipartite(&ts, &hs, |a, b| a == b)
        };
        matched as f64 / hs.len() as f64
    }

    fn ne_surfaces(stmt: &AnnotatedStatement, category: NeCategory) -> BTreeSet<String> {
        stmt.ne_spans
            .iter()
            .filter(|ne| ne.category == category)
            .filter_map(|ne| {
                if ne.start == 0 || ne.end > stmt.tokens.len() {
                    return None;
                }
                Some(
                    stmt.tokens[ne.start - 1..ne.end]
                        .iter()
                        .map(|tok| tok.surface.as_str())
                        .collect::<String>(),
                )
            })
            .collect()
    }

    fn ne_overlap(
        &self,
        t: &AnnotatedStatement,
        h: &AnnotatedStatement,
        category: NeCategory,
    ) -> f64 {
        let st = Self::ne_surfaces(t, category);
        let sh = Self::ne_surfaces(h, category);
        if sh.is_empty() {
            return self.spec.neutral_value;
        }
        let shared = sh.intersection(&st).count();
        shared as f64 / sh.len() as f64
    }

    fn verb_overlap(&self, t: &AnnotatedStatement, h: &AnnotatedStatement) -> f64 {
        let verbs = |stmt: &AnnotatedStatement| -> Vec<String> {
            stmt.tokens
                .iter()
                .filter(|tok| structsim::is_verb_tag(&tok.pos))
                .map(|tok| tok.surface.clone())
                .collect()
        };
        let vt = verbs(t);
        let vh = verbs(h);
        if vh.is_empty() {
            return self.spec.neutral_value;
        }
        let matched = if self.spec.synonyms_on {
            max_bipartite(&vt, &vh, |a, b| self.lex.are_synonyms(a, b))
        } else {
            max_bipartite(&vt, &vh, |a, b| a == b)
        };
        matched as f64 / vh.len() as f64
    }

    /// 1 when H mentions a normalized Arabic number absent from T.
    fn number_mismatch(&self, t: &AnnotatedStatement, h: &AnnotatedStatement) -> f64 {
        let numbers = |raw: &str| -> BTreeSet<String> {
            let normalized = normalize::normalize_numerals(raw, &self.grammar, &self.exceptions);
            let mut out = BTreeSet::new();
            let mut digits = String::new();
            for c in normalized.chars().chain(std::iter::once(' ')) {
                if c.is_ascii_digit() {
                    digits.push(c);
                } else if !digits.is_empty() {
                    let trimmed = digits.trim_start_matches('0');
                    out.insert(if trimmed.is_empty() { "0" } else { trimmed }.to_string());
                    digits.clear();
                }
            }
            out
        };
        let nt = numbers(&t.raw);
        let nh = numbers(&h.raw);
        if nh.is_subset(&nt) {
            0.0
        } else {
            1.0
        }
    }
}

/// Writes the tab-separated vector dump: a header row of feature names plus
/// a final gold column, then one row per pair.
pub fn write_dump(dataset: &Dataset, spec: &FeatureSpec) -> String {
    let mut out = String::new();
    out.push_str("id");
    for name in &spec.enabled {
        out.push('\t');
        out.push_str(name);
    }
    out.push_str("\tgold\n");
    for ((id, fv), label) in dataset.ids.iter().zip(&dataset.vectors).zip(&dataset.labels) {
        out.push_str(id);
        for (_, v) in fv.iter() {
            out.push('\t');
            out.push_str(&format_value(v));
        }
        out.push('\t');
        out.push_str(&label.map_or("-".to_string(), |l| l.to_string()));
        out.push('\n');
    }
    out
}

fn format_value(v: f64) -> String {
    // shortest round-trip decimal form
    format!("{v:?}")
}

/// Parses a vector dump back into a dataset (header defines the layout).
pub fn read_dump(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(path, 1, "empty vector dump"))?;
    let columns: Vec<&str> = header.split('\t').collect();
    if columns.len() < 3 || columns[0] != "id" || *columns.last().unwrap() != "gold" {
        return Err(Error::format(
            path,
            1,
            "header must be `id ⟨tab⟩ feature… ⟨tab⟩ gold`",
        ));
    }
    let names: Vec<String> = columns[1..columns.len() - 1]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut dataset = Dataset::default();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns.len() {
            return Err(Error::format(
                path,
                lineno + 1,
                format!("expected {} fields, found {}", columns.len(), fields.len()),
            ));
        }
        let mut values = Vec::with_capacity(names.len());
        for (name, field) in names.iter().zip(&fields[1..fields.len() - 1]) {
            let v: f64 = field.parse().map_err(|_| {
                Error::format(path, lineno + 1, format!("bad value `{field}` for `{name}`"))
            })?;
            values.push((name.clone(), v));
        }
        let gold = match *fields.last().unwrap() {
            "-" => None,
            s => Some(
                s.parse::<Label>()
                    .map_err(|_| Error::InvalidLabel { line: lineno + 1 })?,
            ),
        };
        dataset.ids.push(fields[0].to_string());
        dataset.vectors.push(FeatureVector::from_pairs(values));
        dataset.labels.push(gold);
    }
    Ok(dataset)
}

/// Human-readable listing of the registry with normalization notes.
pub fn registry_help() -> String {
    let notes: BTreeMap<&str, &str> = [
        ("char_overlap", "shared characters over H's character count"),
        ("word_overlap", "shared token surfaces over H's token count"),
        ("word_overlap_syn", "word overlap with synonym matching"),
        ("len_t", "T token count"),
        ("len_h", "H token count"),
        ("len_ratio", "min/max of the two token counts"),
        ("neg_t", "negation tokens in T"),
        ("neg_h", "negation tokens in H"),
        ("neg_parity", "1 when negation counts have equal parity"),
        ("antonym_count", "distinct antonym pairs across T and H"),
        ("ne_overlap_person", "shared PERSON entities over H's"),
        ("ne_overlap_location", "shared LOCATION entities over H's"),
        ("ne_overlap_organization", "shared ORGANIZATION entities over H's"),
        ("ne_overlap_time", "shared TIME entities over H's"),
        ("verb_overlap", "shared verb surfaces over H's verb count"),
        ("parse_dice", "DICE over parse subtrees (alias F8)"),
        ("pos_dice", "DICE over POS tag collections"),
        ("dep_xr_dice", "DICE over projected XR edge sets (alias F16)"),
        ("number_mismatch", "1 when H has a number T lacks"),
    ]
    .into_iter()
    .collect();
    REGISTRY
        .iter()
        .map(|name| format!("{name}\t{}", notes.get(name).unwrap_or(&"")))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{DepEdge, NeSpan, Token};
    use crate::tree;

    fn tok(surface: &str, pos: &str, index: usize) -> Token {
        Token {
            surface: surface.to_string(),
            pos: pos.to_string(),
            index,
        }
    }

    fn statement(id: &str, words: &[(&str, &str)]) -> AnnotatedStatement {
        let mut s = AnnotatedStatement::new(id, words.iter().map(|(w, _)| *w).collect::<String>());
        s.tokens = words
            .iter()
            .enumerate()
            .map(|(i, (w, p))| tok(w, p, i + 1))
            .collect();
        s
    }

    fn pair(t: AnnotatedStatement, h: AnnotatedStatement) -> StatementPair {
        StatementPair {
            id: "p".to_string(),
            t,
            h,
            gold: None,
        }
    }

    #[test]
    fn identical_statements_hit_the_identity_values() {
        let mut t = statement("p.t", &[("貓", "NN"), ("睡", "VV")]);
        t.parse = Some(tree::parse("(S (NP 貓) (VP 睡))").unwrap());
        t.deps = vec![
            DepEdge { relation: "nsubj".into(), governor: 2, dependent: 1 },
            DepEdge { relation: "root".into(), governor: 0, dependent: 2 },
        ];
        let p = pair(t.clone(), t);
        let spec = FeatureSpec::default();
        let fv = extract(&p, &Lexicons::default(), &spec);
        assert_eq!(fv.get("word_overlap"), Some(1.0));
        assert_eq!(fv.get("neg_parity"), Some(1.0));
        assert_eq!(fv.get("parse_dice"), Some(1.0));
        assert_eq!(fv.get("dep_xr_dice"), Some(1.0));
        assert_eq!(fv.get("antonym_count"), Some(0.0));
        assert_eq!(fv.get("pos_dice"), Some(1.0));
        assert_eq!(fv.get("char_overlap"), Some(1.0));
        assert_eq!(fv.get("len_ratio"), Some(1.0));
    }

    #[test]
    fn negation_asymmetry_flips_parity() {
        let t = statement(
            "p.t",
            &[("千禧年危機", "NN"), ("俗稱", "VV"), ("Y2K危機", "NN")],
        );
        let h = statement(
            "p.h",
            &[("千禧年危機", "NN"), ("並非", "VV"), ("Y2K危機", "NN")],
        );
        let mut lex = Lexicons::default();
        lex.negations.multi.insert("並非".to_string());
        let fv = extract(&pair(t, h), &lex, &FeatureSpec::default());
        assert_eq!(fv.get("neg_t"), Some(0.0));
        assert!(fv.get("neg_h").unwrap() >= 1.0);
        assert_eq!(fv.get("neg_parity"), Some(0.0));
    }

    #[test]
    fn synonym_expansion_raises_word_overlap() {
        let t = statement(
            "p.t",
            &[("噪聲", "NN"), ("降低", "VV"), ("動物", "NN"), ("聽力", "NN")],
        );
        let h = statement(
            "p.h",
            &[("噪聲", "NN"), ("影響", "VV"), ("動物", "NN"), ("聽覺", "NN")],
        );
        let mut lex = Lexicons::default();
        lex.synonyms.add_pair("聽力", "聽覺");
        let fv = extract(&pair(t, h), &lex, &FeatureSpec::default());
        let plain = fv.get("word_overlap").unwrap();
        let expanded = fv.get("word_overlap_syn").unwrap();
        assert!(expanded > plain, "{expanded} vs {plain}");
        assert_eq!(plain, 0.5);
        assert_eq!(expanded, 0.75);
    }

    #[test]
    fn missing_structures_take_the_neutral_value() {
        let t = statement("p.t", &[("甲", "NN")]);
        let h = statement("p.h", &[("乙", "NN")]);
        let spec = FeatureSpec::default();
        let fv = extract(&pair(t, h), &Lexicons::default(), &spec);
        assert_eq!(fv.get("parse_dice"), Some(spec.neutral_value));
        assert_eq!(fv.get("dep_xr_dice"), Some(spec.neutral_value));
        assert_eq!(fv.get("ne_overlap_person"), Some(spec.neutral_value));
    }

    #[test]
    fn ne_overlap_counts_span_surfaces() {
        let mut t = statement("p.t", &[("張", "NR"), ("三", "NR"), ("到", "VV")]);
        t.ne_spans = vec![NeSpan { category: NeCategory::Person, start: 1, end: 2 }];
        let mut h = statement("p.h", &[("張", "NR"), ("三", "NR"), ("走", "VV")]);
        h.ne_spans = vec![NeSpan { category: NeCategory::Person, start: 1, end: 2 }];
        let fv = extract(&pair(t, h), &Lexicons::default(), &FeatureSpec::default());
        assert_eq!(fv.get("ne_overlap_person"), Some(1.0));
    }

    #[test]
    fn number_mismatch_reads_normalized_numbers() {
        let t = statement("p.t", &[("高", "VA"), ("三十二", "CD"), ("層", "M")]);
        let h = statement("p.h", &[("高", "VA"), ("32", "CD"), ("層", "M")]);
        let fv = extract(&pair(t.clone(), h), &Lexicons::default(), &FeatureSpec::default());
        assert_eq!(fv.get("number_mismatch"), Some(0.0));

        let h2 = statement("p.h", &[("高", "VA"), ("20", "CD"), ("層", "M")]);
        let fv2 = extract(&pair(t, h2), &Lexicons::default(), &FeatureSpec::default());
        assert_eq!(fv2.get("number_mismatch"), Some(1.0));
    }

    #[test]
    fn swap_symmetry_for_symmetric_features() {
        let mut t = statement("p.t", &[("貓", "NN"), ("追", "VV"), ("狗", "NN")]);
        t.parse = Some(tree::parse("(S (NP 貓) (VP (VV 追) (NN 狗)))").unwrap());
        t.deps = vec![
            DepEdge { relation: "nsubj".into(), governor: 2, dependent: 1 },
            DepEdge { relation: "dobj".into(), governor: 2, dependent: 3 },
        ];
        let mut h = statement("p.h", &[("狗", "NN"), ("跑", "VV")]);
        h.parse = Some(tree::parse("(S (NP 狗) (VP 跑))").unwrap());
        h.deps = vec![DepEdge { relation: "nsubj".into(), governor: 2, dependent: 1 }];
        let lex = Lexicons::default();
        let spec = FeatureSpec::default();
        let fwd = extract(&pair(t.clone(), h.clone()), &lex, &spec);
        let rev = extract(&pair(h, t), &lex, &spec);
        for name in ["parse_dice", "pos_dice", "dep_xr_dice", "antonym_count"] {
            assert_eq!(fwd.get(name), rev.get(name), "{name}");
        }
        assert_eq!(fwd.get("len_t"), rev.get("len_h"));
        assert_eq!(fwd.get("len_ratio"), rev.get("len_ratio"));
    }

    #[test]
    fn extraction_is_deterministic() {
        let t = statement("p.t", &[("甲", "NN"), ("乙", "VV")]);
        let h = statement("p.h", &[("甲", "NN"), ("丙", "VV")]);
        let p = pair(t, h);
        let lex = Lexicons::default();
        let spec = FeatureSpec::default();
        let a = extract(&p, &lex, &spec);
        let b = extract(&p, &lex, &spec);
        assert_eq!(a, b);
    }

    #[test]
    fn extract_all_preserves_order_and_counts() {
        let mk = |id: &str| StatementPair {
            id: id.to_string(),
            t: statement(&format!("{id}.t"), &[("甲", "NN")]),
            h: statement(&format!("{id}.h"), &[("甲", "NN")]),
            gold: Some(Label::Y),
        };
        let pairs = vec![mk("a"), mk("b"), mk("c")];
        let ds = extract_all(&pairs, &Lexicons::default(), &FeatureSpec::default());
        assert_eq!(ds.ids, vec!["a", "b", "c"]);
        assert_eq!(ds.len(), 3);
        let empty = extract_all(&[], &Lexicons::default(), &FeatureSpec::default());
        assert!(empty.is_empty());
    }

    #[test]
    fn ratios_stay_in_unit_interval() {
        let t = statement("p.t", &[("甲", "NN"), ("乙", "VV"), ("丙", "NN")]);
        let h = statement("p.h", &[("甲", "NN"), ("甲", "NN")]);
        let fv = extract(&pair(t, h), &Lexicons::default(), &FeatureSpec::default());
        for name in [
            "char_overlap",
            "word_overlap",
            "word_overlap_syn",
            "len_ratio",
            "neg_parity",
            "ne_overlap_person",
            "verb_overlap",
            "parse_dice",
            "pos_dice",
            "dep_xr_dice",
            "number_mismatch",
        ] {
            let v = fv.get(name).unwrap();
            assert!((0.0..=1.0).contains(&v), "{name} = {v}");
        }
    }

    #[test]
    fn toy_corpus_extraction_is_finite() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        let pairs = crate::corpus::load_pairs(dir.join("toy_pairs.tsv")).unwrap();
        let (pairs, _) =
            crate::corpus::attach_annotations(pairs, dir.join("toy_annotations.txt")).unwrap();
        let lex = Lexicons {
            synonyms: crate::lexicon::SynonymLexicon::load(dir.join("synonyms.tsv")).unwrap(),
            antonyms: crate::lexicon::AntonymLexicon::load(dir.join("antonyms.tsv")).unwrap(),
            negations: crate::lexicon::NegationList::load(dir.join("negations.txt")).unwrap(),
            definitions: crate::lexicon::DefinitionLexicon::load(dir.join("definitions.tsv"))
                .unwrap(),
        };
        let spec = FeatureSpec::load(dir.join("specs/lm12.spec")).unwrap();
        let ds = extract_all(&pairs, &lex, &spec);
        assert_eq!(ds.len(), 20);
        for (id, fv) in ds.ids.iter().zip(&ds.vectors) {
            assert_eq!(fv.len(), spec.enabled.len());
            for (name, v) in fv.iter() {
                assert!(v.is_finite(), "{id}.{name} = {v}");
            }
        }
    }

    #[test]
    fn feature_spec_file_options_parse() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        use std::io::Write;
        writeln!(f, "# demo\nword_overlap\nF8\noption synonyms=on\noption neutral=0.25").unwrap();
        let spec = FeatureSpec::load(f.path()).unwrap();
        assert_eq!(spec.enabled, vec!["word_overlap", "parse_dice"]);
        assert!(spec.synonyms_on);
        assert_eq!(spec.neutral_value, 0.25);

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "no_such_feature").unwrap();
        assert!(FeatureSpec::load(bad.path()).is_err());
    }

    #[test]
    fn aliases_resolve() {
        assert_eq!(resolve_feature_name("F8").unwrap(), "parse_dice");
        assert_eq!(resolve_feature_name("F16").unwrap(), "dep_xr_dice");
        assert!(resolve_feature_name("no_such_feature").is_err());
    }

    #[test]
    fn dump_round_trip() {
        let t = statement("p.t", &[("甲", "NN")]);
        let h = statement("p.h", &[("甲", "NN")]);
        let pairs = vec![StatementPair {
            id: "p".to_string(),
            t,
            h,
            gold: Some(Label::N),
        }];
        let spec = FeatureSpec::default();
        let ds = extract_all(&pairs, &Lexicons::default(), &spec);
        let dump = write_dump(&ds, &spec);
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), &dump).unwrap();
        let back = read_dump(f.path()).unwrap();
        assert_eq!(back.ids, ds.ids);
        assert_eq!(back.labels, ds.labels);
        assert_eq!(back.vectors, ds.vectors);
    }
}

//! Synonym, antonym, and negation resources, definition trees, and the DICE
//! overlap measure used throughout the toolkit.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use crate::corpus::Token;
use crate::error::{Error, Result};
use crate::tree::{self, TreeNode};

/// A finite multiset with deterministic iteration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Multiset<T: Ord>(BTreeMap<T, usize>);

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Multiset(BTreeMap::new())
    }

    pub fn insert(&mut self, item: T) {
        *self.0.entry(item).or_insert(0) += 1;
    }

    /// Total element count, multiplicities included.
    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, item: &T) -> usize {
        self.0.get(item).copied().unwrap_or(0)
    }

    /// Size of the multiset intersection (per-element minimum counts).
    pub fn intersection_size(&self, other: &Self) -> usize {
        self.0
            .iter()
            .map(|(item, n)| (*n).min(other.count(item)))
            .sum()
    }

    /// Collapses multiplicities to one, giving plain-set semantics.
    pub fn to_set(&self) -> Self
    where
        T: Clone,
    {
        Multiset(self.0.keys().map(|k| (k.clone(), 1)).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, usize)> {
        self.0.iter().map(|(k, n)| (k, *n))
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for item in iter {
            m.insert(item);
        }
        m
    }
}

/// DICE coefficient over multisets: 2|X∩Y| / (|X|+|Y|), where the
/// intersection takes per-element minimum counts.
///
/// Errors when both collections are empty (the quotient is undefined).
pub fn dice<T: Ord>(x: &Multiset<T>, y: &Multiset<T>) -> Result<f64> {
    let total = x.total() + y.total();
    if total == 0 {
        return Err(Error::UndefinedDice);
    }
    Ok(2.0 * x.intersection_size(y) as f64 / total as f64)
}

/// Word groups with symmetric closure applied at load time.
#[derive(Debug, Clone, Default)]
pub struct SynonymLexicon {
    groups: HashMap<String, HashSet<String>>,
}

impl SynonymLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `a ~ b` in both directions. Self-pairs are dropped;
    /// reflexivity is handled in queries instead.
    pub fn add_pair(&mut self, a: &str, b: &str) {
        if a == b {
            return;
        }
        self.groups
            .entry(a.to_string())
            .or_default()
            .insert(b.to_string());
        self.groups
            .entry(b.to_string())
            .or_default()
            .insert(a.to_string());
    }

    pub fn contains_pair(&self, a: &str, b: &str) -> bool {
        self.groups.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Loads lines of the form `word ⟨tab⟩ syn1,syn2,…`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lex = SynonymLexicon::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, rest) = line.split_once('\t').ok_or_else(|| {
                Error::format(path, lineno + 1, "expected `word ⟨tab⟩ syn1,syn2,…`")
            })?;
            for syn in rest.split(',') {
                let syn = syn.trim();
                if !syn.is_empty() {
                    lex.add_pair(word.trim(), syn);
                }
            }
        }
        Ok(lex)
    }
}

/// Antonym pairs, symmetric like [`SynonymLexicon`].
#[derive(Debug, Clone, Default)]
pub struct AntonymLexicon {
    pairs: HashMap<String, HashSet<String>>,
}

impl AntonymLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_pair(&mut self, a: &str, b: &str) {
        if a == b {
            return;
        }
        self.pairs
            .entry(a.to_string())
            .or_default()
            .insert(b.to_string());
        self.pairs
            .entry(b.to_string())
            .or_default()
            .insert(a.to_string());
    }

    pub fn contains_pair(&self, a: &str, b: &str) -> bool {
        self.pairs.get(a).is_some_and(|s| s.contains(b))
    }

    /// Same line format as the synonym file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lex = AntonymLexicon::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, rest) = line.split_once('\t').ok_or_else(|| {
                Error::format(path, lineno + 1, "expected `word ⟨tab⟩ ant1,ant2,…`")
            })?;
            for ant in rest.split(',') {
                let ant = ant.trim();
                if !ant.is_empty() {
                    lex.add_pair(word.trim(), ant);
                }
            }
        }
        Ok(lex)
    }
}

/// Negation vocabulary. Membership tests are exact whole-token matches, so
/// single-character negators never fire inside longer words.
#[derive(Debug, Clone)]
pub struct NegationList {
    pub single: HashSet<String>,
    pub multi: HashSet<String>,
    pub exceptions: HashSet<String>,
}

impl Default for NegationList {
    fn default() -> Self {
        let set = |items: &[&str]| items.iter().map(|s| s.to_string()).collect();
        NegationList {
            single: set(&["無", "未", "不", "非", "沒有"]),
            multi: set(&["無法", "未能", "不行", "不能"]),
            exceptions: set(&["無可厚非"]),
        }
    }
}

impl NegationList {
    pub fn is_negation(&self, surface: &str) -> bool {
        !self.exceptions.contains(surface)
            && (self.single.contains(surface) || self.multi.contains(surface))
    }

    /// Loads a sectioned file: `[single]` / `[multi]` / `[exceptions]`
    /// headers, one token per line. Sections replace the defaults.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut single = HashSet::new();
        let mut multi = HashSet::new();
        let mut exceptions = HashSet::new();
        let mut section: Option<&str> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[single]" => section = Some("single"),
                "[multi]" => section = Some("multi"),
                "[exceptions]" => section = Some("exceptions"),
                token => match section {
                    Some("single") => {
                        single.insert(token.to_string());
                    }
                    Some("multi") => {
                        multi.insert(token.to_string());
                    }
                    Some("exceptions") => {
                        exceptions.insert(token.to_string());
                    }
                    _ => {
                        return Err(Error::format(
                            path,
                            lineno + 1,
                            "token before any [single]/[multi]/[exceptions] section",
                        ))
                    }
                },
            }
        }
        Ok(NegationList {
            single,
            multi,
            exceptions,
        })
    }
}

/// A rooted labeled tree encoding one sense definition.
pub type DefinitionTree = TreeNode;

/// Word definitions plus the DICE threshold for calling two senses synonymous.
#[derive(Debug, Clone)]
pub struct DefinitionLexicon {
    defs: HashMap<String, Vec<DefinitionTree>>,
    pub synonym_threshold: f64,
}

pub const DEFAULT_SYNONYM_THRESHOLD: f64 = 0.88;

impl Default for DefinitionLexicon {
    fn default() -> Self {
        DefinitionLexicon {
            defs: HashMap::new(),
            synonym_threshold: DEFAULT_SYNONYM_THRESHOLD,
        }
    }
}

impl DefinitionLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Words may carry several senses; each call adds one.
    pub fn add(&mut self, word: &str, def: DefinitionTree) {
        self.defs.entry(word.to_string()).or_default().push(def);
    }

    pub fn senses(&self, word: &str) -> &[DefinitionTree] {
        self.defs.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// Loads lines of the form `word ⟨tab⟩ bracketed-definition-tree`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lex = DefinitionLexicon::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, bracketed) = line.split_once('\t').ok_or_else(|| {
                Error::format(path, lineno + 1, "expected `word ⟨tab⟩ definition-tree`")
            })?;
            let def = tree::parse(bracketed.trim())
                .map_err(|e| Error::format(path, lineno + 1, e.to_string()))?;
            lex.add(word.trim(), def);
        }
        Ok(lex)
    }
}

/// Canonical encodings of every internal-node-rooted subtree of `t`.
pub fn subtrees(t: &DefinitionTree) -> Multiset<String> {
    tree::internal_subtrees(t)
}

/// Synonym decision: equality, then list lookup, then the definition-tree
/// DICE test (strictly above the threshold). Polysemous words compare by the
/// best DICE over all sense pairs.
pub fn are_synonyms(
    w1: &str,
    w2: &str,
    syn: &SynonymLexicon,
    defs: &DefinitionLexicon,
) -> bool {
    if w1 == w2 {
        return true;
    }
    if syn.contains_pair(w1, w2) {
        return true;
    }
    let senses1 = defs.senses(w1);
    let senses2 = defs.senses(w2);
    if senses1.is_empty() || senses2.is_empty() {
        return false;
    }
    let mut best = 0.0f64;
    for d1 in senses1 {
        let s1 = subtrees(d1);
        for d2 in senses2 {
            let s2 = subtrees(d2);
            if let Ok(score) = dice(&s1, &s2) {
                best = best.max(score);
            }
        }
    }
    best > defs.synonym_threshold
}

/// Number of tokens whose surface is a negator and not an exception.
pub fn count_negations(tokens: &[Token], neg: &NegationList) -> usize {
    tokens
        .iter()
        .filter(|t| neg.is_negation(&t.surface))
        .count()
}

/// Number of distinct unordered surface pairs (a from T, b from H) that the
/// antonym lexicon relates.
pub fn antonym_hits(tokens_t: &[Token], tokens_h: &[Token], ant: &AntonymLexicon) -> usize {
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for a in tokens_t {
        for b in tokens_h {
            if ant.contains_pair(&a.surface, &b.surface) {
                let key = if a.surface <= b.surface {
                    (a.surface.clone(), b.surface.clone())
                } else {
                    (b.surface.clone(), a.surface.clone())
                };
                seen.insert(key);
            }
        }
    }
    seen.len()
}

//! Structural similarity: the boolean dependency matrix, its powers and
//! their five-power union, and DICE similarities over parse subtrees and
//! POS collections.

use std::collections::BTreeSet;

use crate::corpus::{AnnotatedStatement, DepEdge, ParseNode, Token};
use crate::error::{Error, Result};
use crate::lexicon::{self, Multiset};
use crate::matching::max_bipartite;
use crate::tree;

/// n×n boolean matrix over token positions; `cells[dep][gov]` is true iff an
/// edge runs from that dependent to that governor. ROOT edges are excluded,
/// so the matrix covers word-to-word relationships only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyMatrix {
    n: usize,
    cells: Vec<bool>,
}

/// Union of the first five boolean powers of a dependency matrix: direct
/// relationships plus indirect ones up to four steps removed.
pub type XrMatrix = DependencyMatrix;

impl DependencyMatrix {
    pub fn zeros(n: usize) -> Self {
        DependencyMatrix {
            n,
            cells: vec![false; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cell lookup with 0-based (dependent, governor) positions.
    pub fn get(&self, dep: usize, gov: usize) -> bool {
        self.cells[dep * self.n + gov]
    }

    pub fn set(&mut self, dep: usize, gov: usize, value: bool) {
        self.cells[dep * self.n + gov] = value;
    }

    pub fn count_true(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    /// Boolean matrix product: OR over ANDs.
    pub fn multiply(&self, other: &DependencyMatrix) -> DependencyMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = DependencyMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                if self.get(i, k) {
                    for j in 0..n {
                        if other.get(k, j) {
                            out.set(i, j, true);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn union_with(&mut self, other: &DependencyMatrix) {
        assert_eq!(self.n, other.n);
        for (c, o) in self.cells.iter_mut().zip(&other.cells) {
            *c |= o;
        }
    }
}

/// Word pairs (dependent surface, governor surface) projected from a matrix;
/// duplicate surface pairs merge.
pub type EdgeSet = BTreeSet<(String, String)>;

/// Builds the dependency matrix from 1-based edges, dropping ROOT edges.
pub fn build_r(deps: &[DepEdge], n: usize) -> Result<DependencyMatrix> {
    let mut m = DependencyMatrix::zeros(n);
    for d in deps {
        if d.dependent == 0 || d.dependent > n || d.governor > n {
            return Err(Error::IndexOutOfRange {
                id: String::new(),
                index: d.dependent.max(d.governor),
                len: n,
            });
        }
        if d.governor == 0 {
            continue; // ROOT
        }
        m.set(d.dependent - 1, d.governor - 1, true);
    }
    Ok(m)
}

/// k-th boolean power: true cells mark directed paths of exactly k edges.
pub fn bool_power(r: &DependencyMatrix, k: usize) -> DependencyMatrix {
    assert!(k >= 1, "power must be at least 1");
    let mut out = r.clone();
    for _ in 1..k {
        out = out.multiply(r);
    }
    out
}

/// Union of the first five powers of R.
pub fn xr(r: &DependencyMatrix) -> XrMatrix {
    let mut out = r.clone();
    let mut power = r.clone();
    for _ in 2..=5 {
        power = power.multiply(r);
        out.union_with(&power);
    }
    out
}

/// Projects true cells to (dependent surface, governor surface) pairs.
pub fn project_edges(m: &DependencyMatrix, tokens: &[Token]) -> EdgeSet {
    assert_eq!(m.n(), tokens.len(), "matrix size must match token count");
    let mut set = EdgeSet::new();
    for dep in 0..m.n() {
        for gov in 0..m.n() {
            if m.get(dep, gov) {
                set.insert((tokens[dep].surface.clone(), tokens[gov].surface.clone()));
            }
        }
    }
    set
}

/// Synonym oracle used to widen matches in the similarity measures.
pub type SynOracle<'a> = &'a dyn Fn(&str, &str) -> bool;

/// DICE over the statements' projected XR edge sets. With a synonym oracle,
/// two pairs match when both coordinates are pairwise synonyms; the matched
/// count is a maximum bipartite matching, so a symmetric oracle keeps the
/// score symmetric.
///
/// Returns `None` when either statement has no dependency edges.
pub fn dep_similarity(
    t: &AnnotatedStatement,
    h: &AnnotatedStatement,
    syn: Option<SynOracle>,
) -> Option<f64> {
    if t.deps.is_empty() || h.deps.is_empty() {
        return None;
    }
    let rt = build_r(&t.deps, t.tokens.len()).ok()?;
    let rh = build_r(&h.deps, h.tokens.len()).ok()?;
    let et: Vec<(String, String)> = project_edges(&xr(&rt), &t.tokens).into_iter().collect();
    let eh: Vec<(String, String)> = project_edges(&xr(&rh), &h.tokens).into_iter().collect();
    if et.is_empty() && eh.is_empty() {
        return None;
    }
    let matched = match syn {
        None => max_bipartite(&et, &eh, |a, b| a == b),
        Some(is_syn) => max_bipartite(&et, &eh, |a, b| {
            is_syn(&a.0, &b.0) && is_syn(&a.1, &b.1)
        }),
    };
    Some(2.0 * matched as f64 / (et.len() + eh.len()) as f64)
}

/// DICE over the canonical internal-subtree multisets of two parse trees.
pub fn tree_similarity(t: &ParseNode, h: &ParseNode) -> f64 {
    let st = tree::internal_subtrees(t);
    let sh = tree::internal_subtrees(h);
    lexicon::dice(&st, &sh).unwrap_or(0.0)
}

/// DICE over POS-tag multisets, or over verb-token surfaces when
/// `verbs_only` is set. `None` when both collections are empty.
pub fn pos_similarity(t: &[Token], h: &[Token], verbs_only: bool) -> Option<f64> {
    let collect = |tokens: &[Token]| -> Multiset<String> {
        tokens
            .iter()
            .filter(|tok| !verbs_only || is_verb_tag(&tok.pos))
            .map(|tok| {
                if verbs_only {
                    tok.surface.clone()
                } else {
                    tok.pos.clone()
                }
            })
            .collect()
    };
    let mt = collect(t);
    let mh = collect(h);
    lexicon::dice(&mt, &mh).ok()
}

/// Tags beginning with `V`/`v` are treated as verbs (VV, VC, VE, VA, …).
pub fn is_verb_tag(tag: &str) -> bool {
    tag.starts_with('V') || tag.starts_with('v')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Token;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn toks(surfaces: &[&str]) -> Vec<Token> {
        surfaces
            .iter()
            .enumerate()
            .map(|(i, s)| Token {
                surface: s.to_string(),
                pos: "NN".to_string(),
                index: i + 1,
            })
            .collect()
    }

    fn edge(gov: usize, dep: usize) -> DepEdge {
        DepEdge {
            relation: "dep".to_string(),
            governor: gov,
            dependent: dep,
        }
    }

    /// Collapsed dependencies of the eight-word example sentence
    /// "We consider dependency structures for inferring textual entailment",
    /// with "for" folded into the relation, leaving seven words.
    pub(crate) fn example_sentence() -> (Vec<Token>, Vec<DepEdge>) {
        let tokens = toks(&[
            "We",
            "consider",
            "dependency",
            "structures",
            "inferring",
            "textual",
            "entailment",
        ]);
        let deps = vec![
            edge(2, 1), // nsubj(consider, We)
            edge(0, 2), // root(ROOT, consider)
            edge(4, 3), // amod(structures, dependency)
            edge(2, 4), // dobj(consider, structures)
            edge(2, 5), // prepc_for(consider, inferring)
            edge(7, 6), // amod(entailment, textual)
            edge(5, 7), // dobj(inferring, entailment)
        ];
        (tokens, deps)
    }

    /// Directed-path oracle: enumerates every path of length 1..=max_len by
    /// depth-first walking the raw edge list.
    fn reachable_within(m: &DependencyMatrix, max_len: usize) -> DependencyMatrix {
        let n = m.n();
        let mut out = DependencyMatrix::zeros(n);
        for start in 0..n {
            let mut frontier = vec![start];
            for _ in 0..max_len {
                let mut next = Vec::new();
                for &u in &frontier {
                    for v in 0..n {
                        if m.get(u, v) {
                            out.set(start, v, true);
                            next.push(v);
                        }
                    }
                }
                frontier = next;
            }
        }
        out
    }

    fn surface_cell(m: &DependencyMatrix, tokens: &[Token], dep: &str, gov: &str) -> bool {
        let pos = |s: &str| tokens.iter().position(|t| t.surface == s).unwrap();
        m.get(pos(dep), pos(gov))
    }

    #[test]
    fn example_sentence_matrix_has_six_cells() {
        let (tokens, deps) = example_sentence();
        let r = build_r(&deps, tokens.len()).unwrap();
        assert_eq!(r.count_true(), 6);
        for (dep, gov) in [
            ("We", "consider"),
            ("dependency", "structures"),
            ("structures", "consider"),
            ("inferring", "consider"),
            ("textual", "entailment"),
            ("entailment", "inferring"),
        ] {
            assert!(surface_cell(&r, &tokens, dep, gov), "({dep}, {gov})");
        }
    }

    #[test]
    fn empty_edge_list_gives_all_false() {
        let r = build_r(&[], 4).unwrap();
        assert_eq!(r.count_true(), 0);
    }

    #[test]
    fn single_edge_sets_one_cell() {
        let r = build_r(&[edge(2, 1)], 2).unwrap();
        assert_eq!(r.count_true(), 1);
        assert!(r.get(0, 1));
    }

    #[test]
    fn out_of_range_edge_is_error() {
        assert!(build_r(&[edge(9, 1)], 3).is_err());
        assert!(build_r(&[edge(1, 9)], 3).is_err());
    }

    #[test]
    fn second_power_exposes_one_step_indirection() {
        let (tokens, deps) = example_sentence();
        let r = build_r(&deps, tokens.len()).unwrap();
        let r2 = bool_power(&r, 2);
        for (dep, gov) in [
            ("dependency", "consider"),
            ("textual", "inferring"),
            ("entailment", "consider"),
        ] {
            assert!(surface_cell(&r2, &tokens, dep, gov), "({dep}, {gov})");
        }
        assert_eq!(r2.count_true(), 3);

        let r3 = bool_power(&r, 3);
        assert!(surface_cell(&r3, &tokens, "textual", "consider"));
        assert_eq!(r3.count_true(), 1);

        assert_eq!(bool_power(&r, 4).count_true(), 0);
        assert_eq!(bool_power(&r, 1), r);
    }

    #[test]
    fn five_power_union_on_example_sentence() {
        let (tokens, deps) = example_sentence();
        let r = build_r(&deps, tokens.len()).unwrap();
        let x = xr(&r);
        assert_eq!(x.count_true(), 10);
        assert_eq!(x, reachable_within(&r, 5));
    }

    #[test]
    fn all_false_input_stays_all_false() {
        let r = DependencyMatrix::zeros(5);
        assert_eq!(xr(&r).count_true(), 0);
    }

    #[test]
    fn union_matches_path_oracle_on_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(1..=12);
            let mut m = DependencyMatrix::zeros(n);
            for child in 1..n {
                m.set(child, rng.gen_range(0..child), true);
            }
            assert_eq!(xr(&m), reachable_within(&m, 5));
            // nilpotence for trees: depth ≤ n, so power n+1 is empty
            assert_eq!(bool_power(&m, n + 1).count_true(), 0);
        }
    }

    #[test]
    fn tree_shaped_r_within_depth_five_reaches_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=6); // depth ≤ 5 guaranteed
            let mut m = DependencyMatrix::zeros(n);
            for child in 1..n {
                m.set(child, rng.gen_range(0..child), true);
            }
            // closure = reachability with unbounded length
            assert_eq!(xr(&m), reachable_within(&m, n.max(1)));
        }
    }

    #[test]
    fn adding_an_edge_never_removes_xr_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let n = rng.gen_range(2..=8);
            let mut m = DependencyMatrix::zeros(n);
            for child in 1..n {
                if rng.gen_bool(0.7) {
                    m.set(child, rng.gen_range(0..child), true);
                }
            }
            let before = xr(&m);
            let (i, j) = (rng.gen_range(1..n), rng.gen_range(0..n));
            if i != j {
                let mut grown = m.clone();
                grown.set(i, j, true);
                let after = xr(&grown);
                for dep in 0..n {
                    for gov in 0..n {
                        if before.get(dep, gov) {
                            assert!(after.get(dep, gov));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn projection_merges_duplicate_surfaces() {
        let tokens = toks(&["甲", "甲", "乙"]);
        let r = build_r(&[edge(3, 1), edge(3, 2)], 3).unwrap();
        let set = project_edges(&r, &tokens);
        assert_eq!(set.len(), 1);
        assert!(set.contains(&("甲".to_string(), "乙".to_string())));
        assert!(project_edges(&DependencyMatrix::zeros(3), &tokens).is_empty());
    }

    fn statement(surfaces: &[&str], deps: Vec<DepEdge>) -> AnnotatedStatement {
        let mut s = AnnotatedStatement::new("x", surfaces.concat());
        s.tokens = toks(surfaces);
        s.deps = deps;
        s
    }

    #[test]
    fn dep_similarity_identity_and_disjoint() {
        let a = statement(&["甲", "乙"], vec![edge(2, 1), edge(0, 2)]);
        let b = statement(&["丙", "丁"], vec![edge(2, 1), edge(0, 2)]);
        assert_eq!(dep_similarity(&a, &a, None), Some(1.0));
        assert_eq!(dep_similarity(&a, &b, None), Some(0.0));
        let bare = statement(&["甲"], vec![]);
        assert_eq!(dep_similarity(&a, &bare, None), None);
    }

    #[test]
    fn dep_similarity_worked_example() {
        let (tokens, deps) = example_sentence();
        let mut t = AnnotatedStatement::new("t", "");
        t.tokens = tokens;
        t.deps = deps;
        let h = statement(&["We", "consider", "structures"], vec![edge(2, 1), edge(2, 3)]);
        // T projects 10 pairs, H projects 2, both of H's appear in T:
        // 2·2 / (10+2) = 1/3
        let got = dep_similarity(&t, &h, None).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-15);
        let sym = dep_similarity(&h, &t, None).unwrap();
        assert_eq!(got, sym);
    }

    #[test]
    fn dep_similarity_synonym_oracle_widens_matches() {
        let a = statement(&["貓", "睡"], vec![edge(2, 1)]);
        let b = statement(&["狗", "睡"], vec![edge(2, 1)]);
        assert_eq!(dep_similarity(&a, &b, None), Some(0.0));
        let syn = |x: &str, y: &str| x == y || matches!((x, y), ("貓", "狗") | ("狗", "貓"));
        assert_eq!(dep_similarity(&a, &b, Some(&syn)), Some(1.0));
    }

    #[test]
    fn tree_similarity_worked_example() {
        let a = tree::parse("(S (NP a) (VP b))").unwrap();
        let b = tree::parse("(S (NP a) (VP c))").unwrap();
        // shared internal subtree: (NP a) only → 2·1/(3+3) = 1/3
        assert!((tree_similarity(&a, &b) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(tree_similarity(&a, &a), 1.0);
        let c = tree::parse("(X (Y p) (Z q))").unwrap();
        assert_eq!(tree_similarity(&a, &c), 0.0);
    }

    #[test]
    fn pos_similarity_worked_example() {
        let mk = |tags: &[&str]| -> Vec<Token> {
            tags.iter()
                .enumerate()
                .map(|(i, tag)| Token {
                    surface: format!("w{i}"),
                    pos: tag.to_string(),
                    index: i + 1,
                })
                .collect()
        };
        let t = mk(&["V", "N", "N"]);
        let h = mk(&["V", "N"]);
        assert!((pos_similarity(&t, &h, false).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(pos_similarity(&t, &t, false), Some(1.0));
        assert_eq!(pos_similarity(&[], &[], false), None);
    }

    #[test]
    fn verbs_only_uses_surfaces() {
        let t = vec![
            Token { surface: "跑".into(), pos: "VV".into(), index: 1 },
            Token { surface: "狗".into(), pos: "NN".into(), index: 2 },
        ];
        let h = vec![
            Token { surface: "跑".into(), pos: "VV".into(), index: 1 },
            Token { surface: "貓".into(), pos: "NN".into(), index: 2 },
        ];
        assert_eq!(pos_similarity(&t, &h, true), Some(1.0));
        let no_verbs = vec![Token { surface: "貓".into(), pos: "NN".into(), index: 1 }];
        assert_eq!(pos_similarity(&no_verbs, &no_verbs, true), None);
    }
}

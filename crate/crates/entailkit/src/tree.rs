//! Rooted ordered labeled trees in single-line bracketed notation.
//!
//! The same syntax serves constituency parses and lexicon definition trees:
//! `(S (NP 甲) (VP 乙 丙))`. A bare atom is a leaf; a parenthesized group is
//! an internal node whose first atom is the label.

use crate::error::{Error, Result};
use crate::lexicon::Multiset;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub label: String,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(label: impl Into<String>) -> Self {
        TreeNode {
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<TreeNode>) -> Self {
        TreeNode {
            label: label.into(),
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Total number of nodes, root included.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(TreeNode::size).sum::<usize>()
    }

    /// Number of nodes with at least one child.
    pub fn internal_count(&self) -> usize {
        if self.is_leaf() {
            0
        } else {
            1 + self
                .children
                .iter()
                .map(TreeNode::internal_count)
                .sum::<usize>()
        }
    }

    /// Leaf labels in left-to-right order.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        if self.is_leaf() {
            out.push(&self.label);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }

    /// Canonical bracketed encoding. Two ordered labeled trees are
    /// structurally identical iff their encodings are equal.
    pub fn encode(&self) -> String {
        let mut s = String::new();
        self.encode_into(&mut s);
        s
    }

    fn encode_into(&self, s: &mut String) {
        if self.is_leaf() {
            s.push_str(&self.label);
        } else {
            s.push('(');
            s.push_str(&self.label);
            for c in &self.children {
                s.push(' ');
                c.encode_into(s);
            }
            s.push(')');
        }
    }
}

impl std::fmt::Display for TreeNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Multiset of canonical encodings of every internal-node-rooted subtree.
/// The full tree is included when its root is internal; leaves contribute
/// nothing.
pub fn internal_subtrees(tree: &TreeNode) -> Multiset<String> {
    let mut out = Multiset::new();
    collect_internal(tree, &mut out);
    out
}

fn collect_internal(node: &TreeNode, out: &mut Multiset<String>) {
    if !node.is_leaf() {
        out.insert(node.encode());
        for c in &node.children {
            collect_internal(c, out);
        }
    }
}

/// Parses single-line bracketed notation. Labels and leaf surfaces are any
/// run of characters excluding whitespace and parentheses.
pub fn parse(input: &str) -> Result<TreeNode> {
    let tokens = tokenize(input);
    if tokens.is_empty() {
        return Err(Error::MalformedTree("empty input".into()));
    }
    let mut pos = 0;
    let tree = parse_node(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::MalformedTree(format!(
            "trailing content after tree: `{}`",
            tokens[pos..].join(" ")
        )));
    }
    Ok(tree)
}

fn tokenize(input: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut atom = String::new();
    for ch in input.chars() {
        match ch {
            '(' | ')' => {
                if !atom.is_empty() {
                    tokens.push(std::mem::take(&mut atom));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !atom.is_empty() {
                    tokens.push(std::mem::take(&mut atom));
                }
            }
            c => atom.push(c),
        }
    }
    if !atom.is_empty() {
        tokens.push(atom);
    }
    tokens
}

fn parse_node(tokens: &[String], pos: &mut usize) -> Result<TreeNode> {
    match tokens.get(*pos).map(String::as_str) {
        None => Err(Error::MalformedTree("unexpected end of input".into())),
        Some(")") => Err(Error::MalformedTree("unexpected `)`".into())),
        Some("(") => {
            *pos += 1;
            let label = match tokens.get(*pos).map(String::as_str) {
                Some("(") | Some(")") | None => {
                    return Err(Error::MalformedTree("missing node label after `(`".into()))
                }
                Some(atom) => atom.to_string(),
            };
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        break;
                    }
                    None => return Err(Error::MalformedTree("unbalanced `(`".into())),
                    _ => children.push(parse_node(tokens, pos)?),
                }
            }
            if children.is_empty() {
                return Err(Error::MalformedTree(format!(
                    "internal node `{label}` has no children"
                )));
            }
            Ok(TreeNode::node(label, children))
        }
        Some(atom) => {
            let leaf = TreeNode::leaf(atom);
            *pos += 1;
            Ok(leaf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_encode_round_trip() {
        let src = "(S (NP 甲) (VP 乙 丙))";
        let t = parse(src).unwrap();
        assert_eq!(t.encode(), src);
        assert_eq!(t.leaves(), vec!["甲", "乙", "丙"]);
        assert_eq!(t.size(), 6);
        assert_eq!(t.internal_count(), 3);
    }

    #[test]
    fn single_leaf_has_no_internal_subtrees() {
        let t = parse("甲").unwrap();
        assert!(t.is_leaf());
        assert!(internal_subtrees(&t).is_empty());
    }

    #[test]
    fn root_with_two_leaves_yields_one_subtree() {
        let t = parse("(X a b)").unwrap();
        let subs = internal_subtrees(&t);
        assert_eq!(subs.total(), 1);
        assert_eq!(subs.count(&"(X a b)".to_string()), 1);
    }

    #[test]
    fn identical_structures_encode_equally() {
        let a = parse("(A (B x) (B x))").unwrap();
        let b = TreeNode::node(
            "A",
            vec![
                TreeNode::node("B", vec![TreeNode::leaf("x")]),
                TreeNode::node("B", vec![TreeNode::leaf("x")]),
            ],
        );
        assert_eq!(a.encode(), b.encode());
        assert_eq!(internal_subtrees(&a), internal_subtrees(&b));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse("").is_err());
        assert!(parse("(S (NP 甲)").is_err());
        assert!(parse("(S)").is_err());
        assert!(parse("(S x) y").is_err());
        assert!(parse(")").is_err());
    }

    #[test]
    fn repeated_labels_counted_per_occurrence() {
        let t = parse("(A (B x) (B x) (B y))").unwrap();
        let subs = internal_subtrees(&t);
        assert_eq!(subs.total(), 4);
        assert_eq!(subs.count(&"(B x)".to_string()), 2);
    }
}

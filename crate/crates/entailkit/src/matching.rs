//! Maximum bipartite matching between two item lists under an arbitrary
//! compatibility relation (Kuhn's augmenting-path algorithm).
//!
//! With plain equality this reduces to multiset intersection; with a
//! symmetric relation such as synonymy the matching size is the same from
//! either side, which keeps the similarity measures built on it symmetric.

pub fn max_bipartite<T, F>(left: &[T], right: &[T], compatible: F) -> usize
where
    F: Fn(&T, &T) -> bool,
{
    let adjacency: Vec<Vec<usize>> = left
        .iter()
        .map(|l| {
            right
                .iter()
                .enumerate()
                .filter(|(_, r)| compatible(l, r))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    let mut matched_right: Vec<Option<usize>> = vec![None; right.len()];
    let mut matches = 0;
    for l in 0..left.len() {
        let mut visited = vec![false; right.len()];
        if augment(l, &adjacency, &mut matched_right, &mut visited) {
            matches += 1;
        }
    }
    matches
}

fn augment(
    l: usize,
    adjacency: &[Vec<usize>],
    matched_right: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &r in &adjacency[l] {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        if matched_right[r].is_none()
            || augment(matched_right[r].unwrap(), adjacency, matched_right, visited)
        {
            matched_right[r] = Some(l);
            return true;
        }
    }
    false
}

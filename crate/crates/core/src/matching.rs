//! Bipartite matchings with certificates: perfect matchings in bipartite
//! complements (with Hall violators on failure) and maximum matchings
//! between copy families under a memoized compatibility predicate.

use crate::error::{Error, Result};
use crate::graph::Graph;
use std::collections::HashMap;

/// Maximum bipartite matching by augmenting paths (Kuhn). `adj` is consulted
/// lazily. Returns `match_of_right[j] = Some(i)`.
fn kuhn<F: FnMut(usize, usize) -> bool>(
    n_left: usize,
    n_right: usize,
    adj: &mut F,
) -> Vec<Option<usize>> {
    let mut match_right: Vec<Option<usize>> = vec![None; n_right];
    for i in 0..n_left {
        let mut visited = vec![false; n_right];
        augment(i, n_right, adj, &mut match_right, &mut visited);
    }
    match_right
}

fn augment<F: FnMut(usize, usize) -> bool>(
    i: usize,
    n_right: usize,
    adj: &mut F,
    match_right: &mut Vec<Option<usize>>,
    visited: &mut Vec<bool>,
) -> bool {
    for j in 0..n_right {
        if !visited[j] && adj(i, j) {
            visited[j] = true;
            if match_right[j].is_none() || {
                let prev = match_right[j].unwrap();
                augment(prev, n_right, adj, match_right, visited)
            } {
                match_right[j] = Some(i);
                return true;
            }
        }
    }
    false
}

/// Outcome of the complement perfect-matching search: either a perfect
/// matching through non-edges of G, or a Hall violator S with
/// |N_complement(S)| < |S|.
#[derive(Clone, Debug)]
pub enum ComplementMatching {
    /// Pairs (a, b) with a in A, b in B and ab NOT an edge of G.
    Perfect(Vec<(usize, usize)>),
    /// S is a subset of A whose complement-neighborhood in B is smaller.
    Violator { s: Vec<usize>, neighborhood: Vec<usize> },
}

/// Perfect matching between A and B through the complement of G, or a Hall
/// violator extracted from the final alternating tree.
pub fn complement_perfect_matching(
    g: &Graph,
    a: &[usize],
    b: &[usize],
) -> Result<ComplementMatching> {
    if a.len() != b.len() {
        return Err(Error::Precondition(format!(
            "matching sides differ: |A| = {}, |B| = {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().any(|v| b.contains(v)) {
        return Err(Error::Precondition("matching sides overlap".into()));
    }
    let mut adj = |i: usize, j: usize| !g.has_edge(a[i], b[j]);
    let match_right = kuhn(a.len(), b.len(), &mut adj);
    let matched = match_right.iter().filter(|m| m.is_some()).count();
    if matched == a.len() {
        let mut pairs: Vec<(usize, usize)> = match_right
            .iter()
            .enumerate()
            .map(|(j, m)| (a[m.unwrap()], b[j]))
            .collect();
        pairs.sort_unstable();
        return Ok(ComplementMatching::Perfect(pairs));
    }
    // alternating forest from every exposed left vertex yields the violator:
    // |T| = |S| - #exposed < |S|
    let mut match_left: Vec<Option<usize>> = vec![None; a.len()];
    for (j, m) in match_right.iter().enumerate() {
        if let Some(i) = *m {
            match_left[i] = Some(j);
        }
    }
    let exposed: Vec<usize> = (0..a.len()).filter(|&i| match_left[i].is_none()).collect();
    debug_assert!(!exposed.is_empty());
    let mut s_idx = exposed.clone();
    let mut t_idx: Vec<usize> = Vec::new();
    let mut queue = exposed.clone();
    let mut seen_left = vec![false; a.len()];
    let mut seen_right = vec![false; b.len()];
    for &i in &exposed {
        seen_left[i] = true;
    }
    while let Some(i) = queue.pop() {
        for j in 0..b.len() {
            if !seen_right[j] && !g.has_edge(a[i], b[j]) {
                seen_right[j] = true;
                t_idx.push(j);
                if let Some(next) = match_right[j] {
                    if !seen_left[next] {
                        seen_left[next] = true;
                        s_idx.push(next);
                        queue.push(next);
                    }
                }
            }
        }
    }
    let mut s: Vec<usize> = s_idx.iter().map(|&i| a[i]).collect();
    let mut nbhd: Vec<usize> = t_idx.iter().map(|&j| b[j]).collect();
    s.sort_unstable();
    nbhd.sort_unstable();
    debug_assert!(nbhd.len() < s.len());
    Ok(ComplementMatching::Violator { s, neighborhood: nbhd })
}

/// Result of matching copy families under a compatibility predicate.
#[derive(Clone, Debug)]
pub struct CopyMatching {
    /// Index pairs (left, right).
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_left: Vec<usize>,
    pub unmatched_right: Vec<usize>,
}

/// Maximum matching between copy families; the predicate is evaluated
/// lazily and memoized by (left index, right index) — common-neighborhood
/// tests are the hot path.
pub fn match_copies<F: FnMut(&[usize], &[usize]) -> bool>(
    left: &[Vec<usize>],
    right: &[Vec<usize>],
    mut compatible: F,
) -> CopyMatching {
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    let mut adj = |i: usize, j: usize| {
        *memo.entry((i, j)).or_insert_with(|| compatible(&left[i], &right[j]))
    };
    let match_right = kuhn(left.len(), right.len(), &mut adj);
    let mut pairs = Vec::new();
    let mut left_used = vec![false; left.len()];
    for (j, m) in match_right.iter().enumerate() {
        if let Some(i) = *m {
            pairs.push((i, j));
            left_used[i] = true;
        }
    }
    pairs.sort_unstable();
    let unmatched_left = (0..left.len()).filter(|&i| !left_used[i]).collect();
    let unmatched_right = (0..right.len()).filter(|&j| match_right[j].is_none()).collect();
    CopyMatching { pairs, unmatched_left, unmatched_right }
}

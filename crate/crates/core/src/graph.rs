//! Undirected graphs over dense integer vertex ids, plus the stock
//! generators used throughout the experiments.
//!
//! Adjacency is stored as fixed-width bit rows (cap [`crate::MAX_VERTICES`]),
//! which keeps neighborhood operations at O(n/64) and makes the exact solvers
//! practical at desk scale.

use crate::bits;
use crate::error::{Error, Result};
use crate::ratio::{rat_usize, Rational};
use num::traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    wpr: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.edge_count())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= crate::MAX_VERTICES, "graph order {} exceeds cap", n);
        let wpr = bits::words(n).max(1);
        Graph { n, wpr, rows: vec![0; n * wpr] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Precondition(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::Precondition(format!("self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        bits::set(&mut self.rows[u * self.wpr..(u + 1) * self.wpr], v);
        bits::set(&mut self.rows[v * self.wpr..(v + 1) * self.wpr], u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        bits::clear(&mut self.rows[u * self.wpr..(u + 1) * self.wpr], v);
        bits::clear(&mut self.rows[v * self.wpr..(v + 1) * self.wpr], u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && bits::get(self.row(u), v)
    }

    /// Neighborhood of `v` as a bit row.
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.wpr..(v + 1) * self.wpr]
    }

    pub fn degree(&self, v: usize) -> usize {
        bits::count(self.row(v))
    }

    /// |N(v) ∩ S| for a bitset S.
    pub fn degree_in(&self, v: usize, set: &[u64]) -> usize {
        bits::and_count(self.row(v), set)
    }

    /// |N(v) ∩ S| for an index-list S.
    pub fn degree_in_slice(&self, v: usize, set: &[usize]) -> usize {
        set.iter().filter(|&&u| self.has_edge(v, u)).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        bits::to_indices(self.row(v))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in bits::iter_ones(self.row(u)) {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Edges between disjoint index sets, e(A, B).
    pub fn edges_between(&self, a: &[usize], b: &[usize]) -> usize {
        let bset = bits::from_indices(self.n, b);
        a.iter().map(|&v| self.degree_in(v, &bset)).sum()
    }

    /// Degree sum over a set, e(X, G).
    pub fn edges_to_all(&self, x: &[usize]) -> usize {
        x.iter().map(|&v| self.degree(v)).sum()
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }

    /// Induced subgraph on `verts`, relabeled by position.
    pub fn induced(&self, verts: &[usize]) -> Graph {
        let mut g = Graph::empty(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    // ----- generators -----

    pub fn complete(n: usize) -> Graph {
        Graph::empty(n).complement()
    }

    /// Complete multipartite graph with the given part sizes.
    pub fn complete_multipartite(sizes: &[usize]) -> Result<Graph> {
        if sizes.is_empty() {
            return Err(Error::Precondition("empty part list".into()));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::Precondition("zero part size".into()));
        }
        let n: usize = sizes.iter().sum();
        let mut g = Graph::empty(n);
        let mut starts = vec![0usize];
        for &s in sizes {
            starts.push(starts.last().unwrap() + s);
        }
        for p in 0..sizes.len() {
            for q in p + 1..sizes.len() {
                for u in starts[p]..starts[p + 1] {
                    for v in starts[q]..starts[q + 1] {
                        g.add_edge(u, v);
                    }
                }
            }
        }
        Ok(g)
    }

    /// Part index ranges of [`Graph::complete_multipartite`], in order.
    pub fn multipartite_parts(sizes: &[usize]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut at = 0;
        for &s in sizes {
            out.push((at..at + s).collect());
            at += s;
        }
        out
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        if n >= 3 {
            for v in 0..n {
                g.add_edge(v, (v + 1) % n);
            }
        } else if n == 2 {
            g.add_edge(0, 1);
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    pub fn star(leaves: usize) -> Graph {
        let mut g = Graph::empty(leaves + 1);
        for v in 1..=leaves {
            g.add_edge(0, v);
        }
        g
    }

    pub fn petersen() -> Graph {
        let mut g = Graph::empty(10);
        for v in 0..5 {
            g.add_edge(v, (v + 1) % 5); // outer C_5
            g.add_edge(5 + v, 5 + (v + 2) % 5); // inner pentagram
            g.add_edge(v, 5 + v); // spokes
        }
        g
    }

    /// G(n, p) with exact rational edge probability, deterministic per seed.
    pub fn random(n: usize, p: &Rational, seed: u64) -> Result<Graph> {
        if p.is_negative() || p > &Rational::one() {
            return Err(Error::Precondition(format!(
                "edge probability {} outside [0,1]",
                crate::ratio::format_rational(p)
            )));
        }
        let mut g = Graph::empty(n);
        if p.is_zero() {
            return Ok(g);
        }
        if p.is_one() {
            return Ok(Graph::complete(n));
        }
        let num = p.numer().to_u64().ok_or_else(|| {
            Error::Precondition("edge probability numerator too large".into())
        })?;
        let den = p.denom().to_u64().ok_or_else(|| {
            Error::Precondition("edge probability denominator too large".into())
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_range(0..den) < num {
                    g.add_edge(u, v);
                }
            }
        }
        Ok(g)
    }
}

/// Minimum degree sum over nonadjacent pairs; `None` when G is complete.
pub fn min_nonadjacent_degree_sum(g: &Graph) -> Option<(usize, (usize, usize))> {
    let deg: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut best: Option<(usize, (usize, usize))> = None;
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if !g.has_edge(u, v) {
                let s = deg[u] + deg[v];
                if best.map_or(true, |(b, _)| s < b) {
                    best = Some((s, (u, v)));
                }
            }
        }
    }
    best
}

/// Ore statistics of G against the threshold `2(1 - 1/chi_cr(H)) n`.
#[derive(Clone, Debug)]
pub struct OreReport {
    /// Minimum of d(x)+d(y) over nonadjacent x, y; `None` means +∞ (G complete).
    pub min_sum: Option<usize>,
    /// A nonadjacent pair attaining `min_sum`.
    pub witness_pair: Option<(usize, usize)>,
    pub threshold: Rational,
    /// `min_sum - threshold`; `None` means +∞.
    pub margin: Option<Rational>,
}

impl OreReport {
    /// True when the Ore condition `min_sum >= threshold` holds (or G complete).
    pub fn satisfied(&self) -> bool {
        self.margin.as_ref().map_or(true, |m| !m.is_negative())
    }

    /// True when the margin is at least `want`.
    pub fn margin_at_least(&self, want: &Rational) -> bool {
        self.margin.as_ref().map_or(true, |m| m >= want)
    }
}

/// Ore report of `g` for target graph `h` (threshold `2(1-1/chi_cr(h))·n`).
pub fn ore_report(g: &Graph, h: &Graph) -> Result<OreReport> {
    let threshold = crate::chromatic::ore_threshold(h, g.n())?;
    Ok(ore_report_with_threshold(g, threshold))
}

/// Ore report against an explicit rational threshold.
pub fn ore_report_with_threshold(g: &Graph, threshold: Rational) -> OreReport {
    match min_nonadjacent_degree_sum(g) {
        None => OreReport { min_sum: None, witness_pair: None, threshold, margin: None },
        Some((s, pair)) => {
            let margin = rat_usize(s) - &threshold;
            OreReport {
                min_sum: Some(s),
                witness_pair: Some(pair),
                threshold,
                margin: Some(margin),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    #[test]
    fn complement_of_complete_is_empty() {
        let g = Graph::complete(3);
        let c = g.complement();
        assert_eq!(c.edge_count(), 0);
        assert_eq!(c.n(), 3);
    }

    #[test]
    fn complement_of_empty_is_complete() {
        let g = Graph::empty(4);
        assert_eq!(g.complement(), Graph::complete(4));
    }

    #[test]
    fn c5_self_complementary() {
        let c5 = Graph::cycle(5);
        let comp = c5.complement();
        // complement of 0-1-2-3-4-0 is the pentagram 0-2-4-1-3-0
        for v in 0..5 {
            assert!(comp.has_edge(v, (v + 2) % 5));
            assert!(!comp.has_edge(v, (v + 1) % 5));
        }
        assert_eq!(comp.edge_count(), 5);
    }

    #[test]
    fn multipartite_edge_counts() {
        assert_eq!(Graph::complete_multipartite(&[2, 2, 2]).unwrap().edge_count(), 12);
        assert_eq!(Graph::complete_multipartite(&[1, 2, 2]).unwrap().edge_count(), 8);
        assert_eq!(Graph::complete_multipartite(&[5]).unwrap().edge_count(), 0);
        assert!(Graph::complete_multipartite(&[]).is_err());
    }

    #[test]
    fn random_graph_extremes() {
        let g = Graph::random(10, &rat(0, 1), 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = Graph::random(10, &rat(1, 1), 1).unwrap();
        assert_eq!(g.edge_count(), 45);
    }

    #[test]
    fn random_graph_deterministic_and_binomial() {
        let a = Graph::random(50, &rat(1, 2), 7).unwrap();
        let b = Graph::random(50, &rat(1, 2), 7).unwrap();
        assert_eq!(a, b);
        // mean over 100 seeds within 4 sigma of C(50,2)/2 = 612.5;
        // sigma of the mean = sqrt(1225*1/4)/10 = 1.75
        let total: usize = (0..100)
            .map(|s| Graph::random(50, &rat(1, 2), s).unwrap().edge_count())
            .sum();
        let mean = total as f64 / 100.0;
        assert!((mean - 612.5).abs() < 4.0 * 1.75, "mean {mean}");
    }

    #[test]
    fn petersen_is_cubic() {
        let p = Graph::petersen();
        assert_eq!(p.n(), 10);
        assert_eq!(p.edge_count(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
        // girth 5: no triangles through exhaustive check
        for u in 0..10 {
            for v in u + 1..10 {
                for w in v + 1..10 {
                    assert!(!(p.has_edge(u, v) && p.has_edge(v, w) && p.has_edge(u, w)));
                }
            }
        }
    }

    #[test]
    fn min_sum_and_witness() {
        let c5 = Graph::cycle(5);
        let (s, (u, v)) = min_nonadjacent_degree_sum(&c5).unwrap();
        assert_eq!(s, 4);
        assert!(!c5.has_edge(u, v));
        assert!(min_nonadjacent_degree_sum(&Graph::complete(6)).is_none());
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = Graph::cycle(6);
        let h = g.induced(&[0, 1, 3]);
        assert_eq!(h.n(), 3);
        assert!(h.has_edge(0, 1));
        assert!(!h.has_edge(0, 2));
        assert!(!h.has_edge(1, 2));
    }
}

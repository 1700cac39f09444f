//! Directed graphs (out-adjacency bit rows). Substrate of the transfer
//! digraph machinery.

use crate::bits;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    wpr: usize,
    out: Vec<u64>,
}

impl std::fmt::Debug for Digraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Digraph(n={}, m={})", self.n, self.edge_count())
    }
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= crate::MAX_VERTICES);
        let wpr = bits::words(n).max(1);
        Digraph { n, wpr, out: vec![0; n * wpr] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut d = Digraph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Precondition(format!("arc ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::Precondition(format!("self-loop at {u}")));
            }
            d.add_edge(u, v);
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        bits::set(&mut self.out[u * self.wpr..(u + 1) * self.wpr], v);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && bits::get(self.out_row(u), v)
    }

    pub fn out_row(&self, v: usize) -> &[u64] {
        &self.out[v * self.wpr..(v + 1) * self.wpr]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        bits::count(self.out_row(v))
    }

    pub fn out_neighbors(&self, v: usize) -> Vec<usize> {
        bits::to_indices(self.out_row(v))
    }

    pub fn min_out_degree(&self) -> usize {
        (0..self.n).map(|v| self.out_degree(v)).min().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.out_degree(v)).sum()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in bits::iter_ones(self.out_row(u)) {
                out.push((u, v));
            }
        }
        out
    }

    /// In-neighbor rows, materialized (the reverse digraph).
    pub fn reversed(&self) -> Digraph {
        let mut d = Digraph::empty(self.n);
        for (u, v) in self.edges() {
            d.add_edge(v, u);
        }
        d
    }

    /// Random digraph: each ordered pair becomes an arc with probability p,
    /// deterministic per seed.
    pub fn random(n: usize, p: &crate::ratio::Rational, seed: u64) -> Result<Digraph> {
        use num::traits::{One, Signed, ToPrimitive, Zero};
        use rand::{Rng, SeedableRng};
        if p.is_negative() || p > &crate::ratio::Rational::one() {
            return Err(Error::Precondition("arc probability outside [0,1]".into()));
        }
        let mut d = Digraph::empty(n);
        if p.is_zero() {
            return Ok(d);
        }
        let num = p.numer().to_u64().ok_or_else(|| Error::Precondition("p too fine".into()))?;
        let den = p.denom().to_u64().ok_or_else(|| Error::Precondition("p too fine".into()))?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_range(0..den) < num {
                    d.add_edge(u, v);
                }
            }
        }
        Ok(d)
    }

    /// Random tournament: every unordered pair gets exactly one arc.
    pub fn random_tournament(n: usize, seed: u64) -> Digraph {
        use rand::{Rng, SeedableRng};
        let mut d = Digraph::empty(n);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.5) {
                    d.add_edge(u, v);
                } else {
                    d.add_edge(v, u);
                }
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic() {
        let d = Digraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(d.edge_count(), 3);
        assert!(d.has_edge(0, 1));
        assert!(!d.has_edge(1, 0));
        assert_eq!(d.reversed().out_neighbors(1), vec![0]);
        assert!(Digraph::from_edges(2, &[(0, 0)]).is_err());
    }
}

//! Star packings: exact nu_t via the tiling solver, the maximal greedy
//! packing used by the extremal rebalancing argument, and the exact-rational
//! packing lower bound.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ratio::{rat_usize, Rational};

/// Vertex-disjoint t-stars; every center is adjacent to all of its leaves.
#[derive(Clone, Debug)]
pub struct StarPacking {
    pub stars: Vec<(usize, Vec<usize>)>,
    pub t: usize,
}

impl StarPacking {
    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (c, leaves) in &self.stars {
            out.push(*c);
            out.extend_from_slice(leaves);
        }
        out.sort_unstable();
        out
    }
}

/// Exact maximum t-star packing within `budget` search nodes (a t-star copy
/// is a K_{1,t}-copy, so this rides the tiling solver); the flag reports
/// whether the packing is provably maximum.
pub fn max_star_packing(g: &Graph, t: usize, budget: u64) -> Result<(StarPacking, bool)> {
    if t < 1 {
        return Err(Error::Precondition("star size must be at least 1".into()));
    }
    let star = Graph::star(t);
    let tiling = crate::tiling::max_tiling(g, &star, budget)?;
    let mut stars = Vec::with_capacity(tiling.copies.len());
    for set in &tiling.copies {
        let center = set
            .iter()
            .copied()
            .find(|&c| set.iter().all(|&v| v == c || g.has_edge(c, v)))
            .expect("every K_{1,t} copy has a dominating vertex");
        let leaves: Vec<usize> = set.iter().copied().filter(|&v| v != center).collect();
        stars.push((center, leaves));
    }
    Ok((StarPacking { stars, t }, tiling.optimal))
}

/// Deterministic maximal t-star packing: repeatedly take the lowest-id
/// vertex with t surviving neighbors together with its t lowest neighbors.
/// The residual graph contains no t-star (max degree <= t-1), which is
/// exactly the maximality the packing bound consumes; the count never
/// exceeds nu_t.
pub fn greedy_star_packing(g: &Graph, t: usize) -> Result<StarPacking> {
    if t < 1 {
        return Err(Error::Precondition("star size must be at least 1".into()));
    }
    let mut alive = vec![true; g.n()];
    let mut stars = Vec::new();
    loop {
        let mut found = None;
        'outer: for c in 0..g.n() {
            if !alive[c] {
                continue;
            }
            let leaves: Vec<usize> =
                g.neighbors(c).into_iter().filter(|&v| alive[v]).take(t).collect();
            if leaves.len() == t {
                found = Some((c, leaves));
                break 'outer;
            }
        }
        match found {
            Some((c, leaves)) => {
                alive[c] = false;
                for &v in &leaves {
                    alive[v] = false;
                }
                stars.push((c, leaves));
            }
            None => break,
        }
    }
    Ok(StarPacking { stars, t })
}

/// The star-packing lower bound
/// `(delta - t + 1)(1 - 2 eps1) |U1| / (2 (t+1) Delta)`, exact; may be
/// nonpositive (vacuous) when delta < t.
pub fn star_bound(
    u1_size: usize,
    delta_h: usize,
    delta_max: usize,
    t: usize,
    eps1: &Rational,
) -> Result<Rational> {
    if delta_max == 0 {
        return Err(Error::Precondition("max degree must be positive".into()));
    }
    let num = (rat_usize(delta_h) - rat_usize(t) + rat_usize(1))
        * (rat_usize(1) - rat_usize(2) * eps1)
        * rat_usize(u1_size);
    let den = rat_usize(2) * rat_usize(t + 1) * rat_usize(delta_max);
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, rat_int};

    #[test]
    fn matching_as_one_stars() {
        // perfect matching on 10 vertices: edges are 1-stars
        let mut g = Graph::empty(10);
        for i in 0..5 {
            g.add_edge(2 * i, 2 * i + 1);
        }
        let (p, optimal) = max_star_packing(&g, 1, 1 << 20).unwrap();
        assert!(optimal);
        assert_eq!(p.len(), 5);
    }

    #[test]
    fn one_big_star() {
        let (p, optimal) = max_star_packing(&Graph::star(5), 5, 1 << 20).unwrap();
        assert!(optimal);
        assert_eq!(p.len(), 1);
        assert_eq!(p.stars[0].0, 0);
    }

    #[test]
    fn c6_two_stars() {
        let (p, optimal) = max_star_packing(&Graph::cycle(6), 2, 1 << 20).unwrap();
        assert!(optimal);
        assert_eq!(p.len(), 2);
        for (c, leaves) in &p.stars {
            for l in leaves {
                assert!(Graph::cycle(6).has_edge(*c, *l));
            }
        }
    }

    #[test]
    fn greedy_is_maximal() {
        let p = greedy_star_packing(&Graph::star(7), 3).unwrap();
        assert_eq!(p.len(), 1);
        let p = greedy_star_packing(&Graph::empty(5), 2).unwrap();
        assert!(p.is_empty());
        // residual max degree <= t-1 on a random graph
        let g = Graph::random(40, &rat(1, 2), 23).unwrap();
        let t = 2;
        let p = greedy_star_packing(&g, t).unwrap();
        let used = p.vertices();
        let residual: Vec<usize> = (0..g.n()).filter(|v| !used.contains(v)).collect();
        let res = g.induced(&residual);
        assert!(res.max_degree() <= t - 1);
    }

    #[test]
    fn greedy_never_beats_exact() {
        for seed in 0..5 {
            let g = Graph::random(16, &rat(2, 5), seed).unwrap();
            let (exact, optimal) = max_star_packing(&g, 2, 1 << 22).unwrap();
            assert!(optimal);
            let greedy = greedy_star_packing(&g, 2).unwrap();
            assert!(greedy.len() <= exact.len());
        }
    }

    #[test]
    fn star_bound_values() {
        // |U1| = 2m, delta = 1, Delta = 1, t = 1, eps1 = 0 -> m/2
        let b = star_bound(10, 1, 1, 1, &rat_int(0)).unwrap();
        assert_eq!(b, rat(10, 4));
        // delta < t: nonpositive, vacuous
        let b = star_bound(10, 1, 3, 4, &rat_int(0)).unwrap();
        assert!(b <= rat_int(0));
        assert!(star_bound(10, 1, 0, 1, &rat_int(0)).is_err());
    }
}

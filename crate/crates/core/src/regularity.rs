//! Density bookkeeping and the synthetic regularity substrate: blow-up
//! instances with a known reduced graph, a one-sided regularity refuter, and
//! super-regularity degree checks.
//!
//! Computing regularity partitions of arbitrary graphs is out of scope;
//! every pipeline run starts from a blow-up whose reduced graph is known by
//! construction.

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ratio::{rat_usize, Rational};
use num::traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Subset pairs are enumerated exhaustively when |A| + |B| is at most this.
pub const EXHAUSTIVE_CAP: usize = 16;

/// Clusters of a blow-up together with its reduced graph and the realized
/// pair densities (0 where the reduced graph has no edge).
#[derive(Clone, Debug)]
pub struct ClusterMap {
    pub clusters: Vec<Vec<usize>>,
    pub reduced: Graph,
    pub pair_densities: Vec<Vec<Rational>>,
}

impl ClusterMap {
    pub fn total_vertices(&self) -> usize {
        self.clusters.iter().map(|c| c.len()).sum()
    }
}

/// d(A,B) = e(A,B) / (|A||B|), exact; A and B must be nonempty and disjoint.
pub fn density(g: &Graph, a: &[usize], b: &[usize]) -> Result<Rational> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("density over an empty side".into()));
    }
    if a.iter().any(|v| b.contains(v)) {
        return Err(Error::Precondition("density sides overlap".into()));
    }
    let e = g.edges_between(a, b);
    Ok(rat_usize(e) / (rat_usize(a.len()) * rat_usize(b.len())))
}

/// Blow-up of a reduced graph R: one cluster of size L per vertex of R, a
/// random bipartite pair of density >= d_lo for each edge of R, nothing
/// inside clusters or across non-edges.
pub fn blowup_instance(
    r: &Graph,
    l: usize,
    d_lo: &Rational,
    seed: u64,
) -> Result<(Graph, ClusterMap)> {
    if l < 1 {
        return Err(Error::Precondition("cluster size must be positive".into()));
    }
    if d_lo <= &Rational::zero() || d_lo > &Rational::one() {
        return Err(Error::Precondition("density floor must lie in (0, 1]".into()));
    }
    let ell = r.n();
    let n = ell * l;
    if n > crate::MAX_VERTICES {
        return Err(Error::Precondition(format!("blow-up order {n} exceeds cap")));
    }
    let clusters: Vec<Vec<usize>> = (0..ell).map(|i| (i * l..(i + 1) * l).collect()).collect();
    let mut g = Graph::empty(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // sampling probability sits midway between d_lo and 1 so the repair
    // pass only ever adds a few edges
    let p = d_lo + (Rational::one() - d_lo) / rat_usize(2);
    let (pn, pd) = (
        p.numer().try_into().unwrap_or(u64::MAX),
        p.denom().try_into().unwrap_or(u64::MAX),
    );
    let need = crate::ratio::ceil_int(&(d_lo * rat_usize(l) * rat_usize(l)));
    let mut pair_densities = vec![vec![Rational::zero(); ell]; ell];
    for i in 0..ell {
        for j in i + 1..ell {
            if !r.has_edge(i, j) {
                continue;
            }
            let mut missing = Vec::new();
            let mut edges = 0usize;
            for &u in &clusters[i] {
                for &v in &clusters[j] {
                    if rng.gen_range(0..pd) < pn {
                        g.add_edge(u, v);
                        edges += 1;
                    } else {
                        missing.push((u, v));
                    }
                }
            }
            // repair up to the exact density floor
            let need_usize: usize = (&need).try_into().unwrap_or(usize::MAX);
            if edges < need_usize {
                missing.shuffle(&mut rng);
                for &(u, v) in missing.iter().take(need_usize - edges) {
                    g.add_edge(u, v);
                    edges += 1;
                }
            }
            let d = rat_usize(edges) / (rat_usize(l) * rat_usize(l));
            pair_densities[i][j] = d.clone();
            pair_densities[j][i] = d;
        }
    }
    Ok((g, ClusterMap { clusters, reduced: r.clone(), pair_densities }))
}

/// A pair of witness subsets refuting eps-regularity: |X| > eps|A|,
/// |Y| > eps|B|, and |d(X,Y) - d(A,B)| >= eps, all exact.
#[derive(Clone, Debug)]
pub struct RegularityWitness {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub deviation: Rational,
}

/// One-sided regularity refutation: a returned witness certifies the pair is
/// NOT eps-regular; `None` is not a regularity certificate. Exhaustive over
/// all subset pairs when |A|+|B| <= [`EXHAUSTIVE_CAP`], else `budget` random
/// subset pairs with sizes uniform above the eps-fraction floor.
pub fn refute_regularity(
    g: &Graph,
    a: &[usize],
    b: &[usize],
    eps: &Rational,
    budget: u64,
    seed: u64,
) -> Result<Option<RegularityWitness>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("regularity of an empty side".into()));
    }
    let base = density(g, a, b)?;
    // strict floors: |X| > eps|A| means |X| >= floor(eps|A|) + 1
    let floor_a = size_floor(eps, a.len());
    let floor_b = size_floor(eps, b.len());
    if floor_a > a.len() || floor_b > b.len() {
        return Ok(None);
    }
    if a.len() + b.len() <= EXHAUSTIVE_CAP {
        let mut best: Option<RegularityWitness> = None;
        for xm in 1u32..(1 << a.len()) {
            if (xm.count_ones() as usize) < floor_a {
                continue;
            }
            let x: Vec<usize> = pick(a, xm);
            for ym in 1u32..(1 << b.len()) {
                if (ym.count_ones() as usize) < floor_b {
                    continue;
                }
                let y: Vec<usize> = pick(b, ym);
                if let Some(w) = witness_for(g, &x, &y, &base, eps) {
                    if best.as_ref().map_or(true, |bst| w.deviation > bst.deviation) {
                        best = Some(w);
                    }
                }
            }
        }
        return Ok(best);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let sx = rng.gen_range(floor_a..=a.len());
        let sy = rng.gen_range(floor_b..=b.len());
        let x = sample(a, sx, &mut rng);
        let y = sample(b, sy, &mut rng);
        if let Some(w) = witness_for(g, &x, &y, &base, eps) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn size_floor(eps: &Rational, n: usize) -> usize {
    // smallest size strictly above eps*n
    let lo = eps * rat_usize(n);
    let f: usize = crate::ratio::floor_int(&lo).try_into().unwrap_or(usize::MAX);
    f + 1
}

fn pick(base: &[usize], mask: u32) -> Vec<usize> {
    base.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect()
}

fn sample(base: &[usize], size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pool = base.to_vec();
    pool.shuffle(rng);
    pool.truncate(size);
    pool.sort_unstable();
    pool
}

fn witness_for(
    g: &Graph,
    x: &[usize],
    y: &[usize],
    base: &Rational,
    eps: &Rational,
) -> Option<RegularityWitness> {
    let d = density(g, x, y).ok()?;
    let dev = (d - base).abs();
    if &dev >= eps {
        Some(RegularityWitness { x: x.to_vec(), y: y.to_vec(), deviation: dev })
    } else {
        None
    }
}

/// Vertices violating the one-sided super-regularity degree bound
/// d(a) > d|B| (and symmetrically on the B side).
#[derive(Clone, Debug)]
pub struct SuperRegularReport {
    pub violators_a: Vec<usize>,
    pub violators_b: Vec<usize>,
}

impl SuperRegularReport {
    pub fn ok(&self) -> bool {
        self.violators_a.is_empty() && self.violators_b.is_empty()
    }
}

pub fn super_regular_degree_check(
    g: &Graph,
    a: &[usize],
    b: &[usize],
    d: &Rational,
) -> Result<SuperRegularReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("super-regularity of an empty side".into()));
    }
    if a.iter().any(|v| b.contains(v)) {
        return Err(Error::Precondition("sides overlap".into()));
    }
    let bset = bits::from_indices(g.n(), b);
    let aset = bits::from_indices(g.n(), a);
    let tb = d * rat_usize(b.len());
    let ta = d * rat_usize(a.len());
    let violators_a: Vec<usize> =
        a.iter().copied().filter(|&v| rat_usize(g.degree_in(v, &bset)) <= tb).collect();
    let violators_b: Vec<usize> =
        b.iter().copied().filter(|&v| rat_usize(g.degree_in(v, &aset)) <= ta).collect();
    Ok(SuperRegularReport { violators_a, violators_b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    #[test]
    fn density_examples() {
        let g = Graph::complete_multipartite(&[3, 3]).unwrap();
        let a: Vec<usize> = (0..3).collect();
        let b: Vec<usize> = (3..6).collect();
        assert_eq!(density(&g, &a, &b).unwrap(), rat(1, 1));
        let e = Graph::empty(6);
        assert_eq!(density(&e, &a, &b).unwrap(), rat(0, 1));
        // C_4 color classes
        let c4 = Graph::cycle(4);
        assert_eq!(density(&c4, &[0, 2], &[1, 3]).unwrap(), rat(1, 1));
        assert!(density(&c4, &[], &[1]).is_err());
        assert!(density(&c4, &[0, 1], &[1, 2]).is_err());
    }

    #[test]
    fn blowup_shapes() {
        let (g, map) = blowup_instance(&Graph::complete(2), 3, &rat(1, 1), 0).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edge_count(), 9); // complete bipartite K_{3,3}
        assert_eq!(map.clusters.len(), 2);

        let (g, _) = blowup_instance(&Graph::empty(1), 5, &rat(1, 2), 0).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn blowup_densities_respect_floor() {
        let d_lo = rat(9, 10);
        let (g, map) = blowup_instance(&Graph::complete(3), 40, &d_lo, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                assert!(map.pair_densities[i][j] >= d_lo);
                let measured =
                    density(&g, &map.clusters[i], &map.clusters[j]).unwrap();
                assert_eq!(measured, map.pair_densities[i][j]);
            }
        }
        // no intra-cluster edges
        for c in &map.clusters {
            assert_eq!(g.induced(c).edge_count(), 0);
        }
    }

    #[test]
    fn blowup_edges_respect_reduced_graph() {
        let r = Graph::path(3); // edge 0-1, 1-2, no edge 0-2
        let (g, map) = blowup_instance(&r, 10, &rat(19, 20), 9).unwrap();
        for (u, v) in g.edges() {
            let cu = u / 10;
            let cv = v / 10;
            assert!(r.has_edge(cu, cv), "edge ({u},{v}) crosses non-edge ({cu},{cv})");
        }
        assert_eq!(map.pair_densities[0][2], rat(0, 1));
    }

    #[test]
    fn refuter_on_complete_pair_is_silent() {
        let g = Graph::complete_multipartite(&[4, 4]).unwrap();
        let a: Vec<usize> = (0..4).collect();
        let b: Vec<usize> = (4..8).collect();
        let w = refute_regularity(&g, &a, &b, &rat(1, 10), 100, 0).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn refuter_finds_block_structure() {
        // A1-B1 and A2-B2 complete, no cross edges: deviation 1/2 at eps=1/4
        let mut g = Graph::empty(8);
        for u in 0..2 {
            for v in 4..6 {
                g.add_edge(u, v);
            }
        }
        for u in 2..4 {
            for v in 6..8 {
                g.add_edge(u, v);
            }
        }
        let a: Vec<usize> = (0..4).collect();
        let b: Vec<usize> = (4..8).collect();
        let w = refute_regularity(&g, &a, &b, &rat(1, 4), 100, 0).unwrap().unwrap();
        assert_eq!(w.deviation, rat(1, 2));
        assert!(w.x.len() >= 2 && w.y.len() >= 2);
        // witness inequalities hold exactly
        let d = density(&g, &w.x, &w.y).unwrap();
        let base = density(&g, &a, &b).unwrap();
        assert!((d - base).abs() >= rat(1, 4));
    }

    #[test]
    fn refuter_sampled_mode_mostly_quiet_on_dense_pairs() {
        let (g, map) = blowup_instance(&Graph::complete(2), 12, &rat(9, 10), 5).unwrap();
        let mut hits = 0;
        for seed in 0..10 {
            if refute_regularity(&g, &map.clusters[0], &map.clusters[1], &rat(2, 5), 500, seed)
                .unwrap()
                .is_some()
            {
                hits += 1;
            }
        }
        assert!(hits <= 2, "dense pair refuted in {hits}/10 seeds");
    }

    #[test]
    fn super_regular_check() {
        let g = Graph::complete_multipartite(&[3, 3]).unwrap();
        let a: Vec<usize> = (0..3).collect();
        let b: Vec<usize> = (3..6).collect();
        assert!(super_regular_degree_check(&g, &a, &b, &rat(9, 10)).unwrap().ok());

        let mut g2 = g.clone();
        for v in 3..6 {
            g2.remove_edge(0, v);
        }
        let rep = super_regular_degree_check(&g2, &a, &b, &rat(1, 10)).unwrap();
        assert_eq!(rep.violators_a, vec![0]);
    }
}

//! Instance generators for the experiments: near-extremal complete
//! multipartite graphs at the critical proportions, Ore-repaired random
//! graphs, and blow-up pipeline instances.

use crate::chromatic::{self, BottleSpec};
use crate::error::{Error, Result};
use crate::graph::{min_nonadjacent_degree_sum, ore_report_with_threshold, Graph};
use crate::ratio::{rat_usize, Rational};
use crate::regularity::ClusterMap;
use num::traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremalKind {
    /// Exact critical proportions (the space barrier).
    SpaceBarrier,
    /// Proportions with a seeded +-2 vertex perturbation, Ore-repaired.
    NearThreshold,
}

/// Complete chi(H)-partite graph with part sizes at the critical-chromatic
/// proportions (s, t, ..., t), s = sigma/h: Ore margin >= 0 and within O(1)
/// of 0.
pub fn gen_extremal_instance(
    h: &Graph,
    n: usize,
    kind: ExtremalKind,
    seed: u64,
) -> Result<Graph> {
    if n < h.n() {
        return Err(Error::Precondition(format!("n = {n} below |H| = {}", h.n())));
    }
    let profile = chromatic::smallest_color_class(h)?;
    let (k, sigma, order) = (profile.chi, profile.sigma, h.n());
    if k < 2 {
        return Err(Error::Precondition("H must have an edge".into()));
    }
    let chi_cr = chromatic::chi_critical_from(k, order, sigma);
    // big parts at floor(n / chi_cr) keep the largest part at the critical
    // fraction; the neck absorbs the remainder
    let t_size: usize = crate::ratio::floor_int(&(rat_usize(n) / &chi_cr))
        .to_usize()
        .ok_or_else(|| Error::Precondition("n too large".into()))?;
    let mut sizes = vec![t_size; k - 1];
    let small = n - (k - 1) * t_size;
    if small == 0 {
        return Err(Error::Precondition(format!("n = {n} leaves an empty neck part")));
    }
    sizes.insert(0, small);
    let mut g = Graph::complete_multipartite(&sizes)?;
    if kind == ExtremalKind::NearThreshold {
        // move up to 2 random vertices between big parts, then repair
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parts = Graph::multipartite_parts(&sizes);
        for _ in 0..2 {
            if k < 3 {
                break;
            }
            let from = 1 + rng.gen_range(0..k - 1);
            let mut to = 1 + rng.gen_range(0..k - 1);
            while to == from {
                to = 1 + rng.gen_range(0..k - 1);
            }
            if let Some(&v) = parts[from].first() {
                // re-home v: drop edges into `to`, add edges inside `from`
                for &u in &parts[to] {
                    if g.has_edge(v, u) {
                        g.remove_edge(v, u);
                    }
                }
                for &u in &parts[from] {
                    if u != v && !g.has_edge(v, u) {
                        g.add_edge(v, u);
                    }
                }
            }
        }
        let threshold = chromatic::ore_threshold_from(&chi_cr, n);
        g = repair_to_margin(g, &threshold, &rat_usize(0));
    }
    // post-condition: margin in [0, O(1)]
    let report = crate::graph::ore_report(&g, h)?;
    if !report.satisfied() {
        return Err(Error::Lemma("extremal instance missed the Ore bound".into()));
    }
    if let Some(m) = &report.margin {
        if m > &rat_usize(4 * order) {
            return Err(Error::Lemma(format!(
                "extremal instance margin {} not within O(1) of threshold",
                crate::ratio::format_rational(m)
            )));
        }
    }
    Ok(g)
}

/// Adds edges between minimum-sum nonadjacent pairs until the Ore margin
/// against `threshold` reaches `want`; converges to the complete graph in
/// the worst case.
fn repair_to_margin(mut g: Graph, threshold: &Rational, want: &Rational) -> Graph {
    loop {
        match min_nonadjacent_degree_sum(&g) {
            None => return g,
            Some((s, (u, v))) => {
                if &(rat_usize(s) - threshold) >= want {
                    return g;
                }
                g.add_edge(u, v);
            }
        }
    }
}

/// Random graph conditioned on the Ore condition for H with at least the
/// requested margin, by edge repair at minimum-sum nonadjacent pairs.
/// Deterministic per seed.
pub fn gen_ore_instance(h: &Graph, n: usize, margin: usize, seed: u64) -> Result<Graph> {
    let chi_cr = chromatic::chi_critical(h)?;
    let base_p = Rational::one() - chi_cr.recip();
    let g = Graph::random(n, &base_p, seed)?;
    let threshold = chromatic::ore_threshold_from(&chi_cr, n);
    let want = rat_usize(margin);
    let g = repair_to_margin(g, &threshold, &want);
    debug_assert!(ore_report_with_threshold(&g, threshold).margin_at_least(&want));
    Ok(g)
}

/// A pipeline instance: blow-up of a complete reduced graph into factor
/// elements shaped for H, plus an exceptional set V0 of high-degree extras.
#[derive(Clone, Debug)]
pub struct PipelineInstance {
    pub g: Graph,
    pub mapping: ClusterMap,
    /// Cluster tuples (ids into `mapping.clusters`), one per element.
    pub factor: Vec<Vec<usize>>,
    pub v0: Vec<usize>,
}

/// Builds `elements` factor elements of cluster sizes (L, ..., L, small)
/// where small = L for a balanced spec and round(alpha' L) otherwise, pair
/// densities >= d_lo across every cluster pair (complete reduced graph),
/// and |V0| = floor(theta n) universal-ish extra vertices.
pub fn gen_pipeline_instance(
    spec: &BottleSpec,
    elements: usize,
    l: usize,
    d_lo: &Rational,
    alpha_prime: &Rational,
    theta: &Rational,
    seed: u64,
) -> Result<PipelineInstance> {
    if elements == 0 || l == 0 {
        return Err(Error::Precondition("need at least one element".into()));
    }
    let k = spec.k;
    let small = if spec.is_balanced() {
        l
    } else {
        let exact = alpha_prime * rat_usize(l);
        let rounded = crate::ratio::floor_int(&(exact + crate::ratio::rat(1, 2)));
        rounded.to_usize().unwrap_or(l).max(spec.sigma).min(l)
    };
    let mut sizes = Vec::new();
    let mut factor = Vec::new();
    for e in 0..elements {
        let mut tuple = Vec::new();
        for pos in 0..k {
            tuple.push(e * k + pos);
            sizes.push(if pos + 1 == k { small } else { l });
        }
        factor.push(tuple);
    }
    let ell = sizes.len();
    let core_n: usize = sizes.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // clusters laid out consecutively
    let mut clusters = Vec::with_capacity(ell);
    let mut at = 0;
    for &s in &sizes {
        clusters.push((at..at + s).collect::<Vec<usize>>());
        at += s;
    }
    // v0 joins after the core
    let theta_cap = theta * rat_usize(core_n) / (Rational::one() - theta);
    let v0_count = crate::ratio::floor_int(&theta_cap).to_usize().unwrap_or(0);
    let n = core_n + v0_count;
    let mut g = Graph::empty(n);

    let (pn, pd) = sample_prob(d_lo);
    let mut pair_densities = vec![vec![crate::ratio::rat(0, 1); ell]; ell];
    for i in 0..ell {
        for j in i + 1..ell {
            let mut edges = 0usize;
            let mut missing = Vec::new();
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
            let need = crate::ratio::ceil_int(
                &(d_lo * rat_usize(clusters[i].len()) * rat_usize(clusters[j].len())),
            )
            .to_usize()
            .unwrap_or(0);
            if edges < need {
                use rand::seq::SliceRandom;
                missing.shuffle(&mut rng);
                for &(u, v) in missing.iter().take(need - edges) {
                    g.add_edge(u, v);
                    edges += 1;
                }
            }
            let d = rat_usize(edges)
                / (rat_usize(clusters[i].len()) * rat_usize(clusters[j].len()));
            pair_densities[i][j] = d.clone();
            pair_densities[j][i] = d;
        }
    }
    // V0: extras adjacent to ~9/10 of the core (high degree, lands in V0^2)
    let v0: Vec<usize> = (core_n..n).collect();
    for &x in &v0 {
        for u in 0..core_n {
            if rng.gen_range(0..10u64) < 9 {
                g.add_edge(x, u);
            }
        }
        // V0 vertices pairwise adjacent so a low-degree split still forms a
        // clique
        for &y in &v0 {
            if y < x {
                g.add_edge(x, y);
            }
        }
    }
    let reduced = Graph::complete(ell);
    Ok(PipelineInstance {
        g,
        mapping: ClusterMap { clusters, reduced, pair_densities },
        factor,
        v0,
    })
}

fn sample_prob(d_lo: &Rational) -> (u64, u64) {
    let p = d_lo + (Rational::one() - d_lo) / rat_usize(2);
    (
        p.numer().to_u64().unwrap_or(1),
        p.denom().to_u64().unwrap_or(1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;
    use num::traits::Signed;

    #[test]
    fn extremal_k3_is_threshold_tripartite() {
        let g = gen_extremal_instance(&Graph::complete(3), 9, ExtremalKind::SpaceBarrier, 0)
            .unwrap();
        assert_eq!(g, Graph::complete_multipartite(&[3, 3, 3]).unwrap());
        let rep = crate::graph::ore_report(&g, &Graph::complete(3)).unwrap();
        assert_eq!(rep.margin, Some(rat(0, 1)));
    }

    #[test]
    fn extremal_star_proportions() {
        let g = gen_extremal_instance(&Graph::star(2), 30, ExtremalKind::NearThreshold, 1)
            .unwrap();
        let rep = crate::graph::ore_report(&g, &Graph::star(2)).unwrap();
        let m = rep.margin.unwrap();
        assert!(!m.is_negative());
        assert!(m <= rat(4, 1), "margin {m}");
    }

    #[test]
    fn ore_instances_meet_requested_margin() {
        for seed in 0..5 {
            let g = gen_ore_instance(&Graph::complete(2), 20, 0, seed).unwrap();
            let (s, _) = min_nonadjacent_degree_sum(&g).map_or((20, (0, 0)), |x| x);
            assert!(s >= 20, "min sum {s}");
        }
        // huge margin saturates toward completeness
        let g = gen_ore_instance(&Graph::complete(3), 12, 100, 3).unwrap();
        assert!(min_nonadjacent_degree_sum(&g).is_none());
    }

    #[test]
    fn pipeline_instance_shapes() {
        let spec = BottleSpec::new(2, 1, 1).unwrap();
        let inst =
            gen_pipeline_instance(&spec, 3, 20, &rat(9, 10), &rat(1, 2), &rat(1, 100), 7).unwrap();
        assert_eq!(inst.mapping.clusters.len(), 6);
        assert_eq!(inst.factor.len(), 3);
        assert!(inst.v0.len() <= inst.g.n() / 100 + 1);
        // every cross-pair density at least the floor
        for e in &inst.factor {
            let d = crate::regularity::density(
                &inst.g,
                &inst.mapping.clusters[e[0]],
                &inst.mapping.clusters[e[1]],
            )
            .unwrap();
            assert!(d >= rat(9, 10));
        }
    }

    #[test]
    fn pipeline_instance_unbalanced_small_cluster() {
        let spec = BottleSpec::new(3, 1, 2).unwrap();
        let inst =
            gen_pipeline_instance(&spec, 2, 36, &rat(9, 10), &rat(19, 36), &rat(1, 100), 7)
                .unwrap();
        for e in &inst.factor {
            let small = inst.mapping.clusters[e[2]].len();
            assert_eq!(small, 19); // round(19/36 * 36)
            assert_eq!(inst.mapping.clusters[e[0]].len(), 36);
        }
    }
}

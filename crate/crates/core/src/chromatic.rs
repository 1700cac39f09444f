//! Chromatic invariants of the target graph H: chromatic number, smallest
//! color class over all optimal colorings, critical chromatic number,
//! bottle graphs, and the derived Ore parameters.
//!
//! sigma quantifies over ALL optimal colorings, so it is computed by full
//! enumeration with symmetry pruning (desk cap |H| <= 24); sampling would be
//! unsound.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ratio::{rat_int, rat_usize, Rational};
use num::traits::One;
use std::collections::BTreeSet;

/// Desk cap for exact coloring enumeration.
pub const MAX_H: usize = 24;

const DEFAULT_COLORING_BUDGET: u64 = 50_000_000;

/// Exact chromatic number via iterative-deepening backtracking with a clique
/// lower bound. Errors when the node budget runs out.
pub fn chromatic_number(h: &Graph) -> Result<usize> {
    chromatic_number_budgeted(h, DEFAULT_COLORING_BUDGET)
}

pub fn chromatic_number_budgeted(h: &Graph, budget: u64) -> Result<usize> {
    let n = h.n();
    if n == 0 {
        return Err(Error::Precondition("empty graph has no chromatic number here".into()));
    }
    if n > MAX_H {
        return Err(Error::Precondition(format!("|H| = {n} exceeds desk cap {MAX_H}")));
    }
    let lb = greedy_clique(h).len();
    let mut nodes = 0u64;
    for k in lb..=n {
        let mut colors = vec![usize::MAX; n];
        if colorable(h, k, &mut colors, 0, 0, &mut nodes, budget)? {
            return Ok(k);
        }
    }
    unreachable!("n colors always suffice")
}

fn colorable(
    h: &Graph,
    k: usize,
    colors: &mut [usize],
    next: usize,
    max_used: usize,
    nodes: &mut u64,
    budget: u64,
) -> Result<bool> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::Budget(format!("coloring search exceeded {budget} nodes")));
    }
    if next == h.n() {
        return Ok(true);
    }
    // colors introduced in increasing order; trying max_used+1 fresh colors
    // is enough to cover all colorings up to permutation
    let cap = k.min(max_used + 1);
    for c in 0..=cap.min(k - 1) {
        if h.neighbors(next).iter().all(|&u| colors[u] != c) {
            colors[next] = c;
            if colorable(h, k, colors, next + 1, max_used.max(c + 1), nodes, budget)? {
                colors[next] = usize::MAX;
                return Ok(true);
            }
            colors[next] = usize::MAX;
        }
    }
    Ok(false)
}

/// Greedy clique, used as a coloring lower bound.
fn greedy_clique(h: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..h.n()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(h.degree(v)));
    let mut best: Vec<usize> = Vec::new();
    for &start in &order {
        let mut clique = vec![start];
        for &v in &order {
            if v != start && clique.iter().all(|&u| h.has_edge(u, v)) {
                clique.push(v);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Class-size census over all optimal colorings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringProfile {
    pub chi: usize,
    /// Smallest color class appearing in any chi-coloring.
    pub sigma: usize,
    /// Sorted class-size tuples, one per optimal coloring up to class
    /// permutation, deduplicated.
    pub optimal_class_size_multisets: Vec<Vec<usize>>,
}

/// Enumerates all proper chi(H)-colorings up to class relabeling and reports
/// sigma together with the class-size census.
pub fn smallest_color_class(h: &Graph) -> Result<ColoringProfile> {
    smallest_color_class_budgeted(h, DEFAULT_COLORING_BUDGET)
}

pub fn smallest_color_class_budgeted(h: &Graph, budget: u64) -> Result<ColoringProfile> {
    let chi = chromatic_number_budgeted(h, budget)?;
    let n = h.n();
    let mut tuples = BTreeSet::new();
    let mut colors = vec![usize::MAX; n];
    let mut sizes = vec![0usize; chi];
    let mut nodes = 0u64;
    enumerate_colorings(h, chi, &mut colors, 0, 0, &mut sizes, &mut tuples, &mut nodes, budget)?;
    let sigma = tuples
        .iter()
        .map(|t| t[0])
        .min()
        .expect("a chi-coloring exists by definition of chi");
    Ok(ColoringProfile {
        chi,
        sigma,
        optimal_class_size_multisets: tuples.into_iter().collect(),
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_colorings(
    h: &Graph,
    chi: usize,
    colors: &mut [usize],
    next: usize,
    max_used: usize,
    sizes: &mut [usize],
    tuples: &mut BTreeSet<Vec<usize>>,
    nodes: &mut u64,
    budget: u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::Budget(format!("coloring enumeration exceeded {budget} nodes")));
    }
    if next == h.n() {
        if max_used == chi {
            let mut t = sizes.to_vec();
            t.sort_unstable();
            tuples.insert(t);
        }
        return Ok(());
    }
    let cap = chi.min(max_used + 1);
    for c in 0..=cap.min(chi - 1) {
        if h.neighbors(next).iter().all(|&u| colors[u] != c) {
            colors[next] = c;
            sizes[c] += 1;
            enumerate_colorings(
                h,
                chi,
                colors,
                next + 1,
                max_used.max(c + 1),
                sizes,
                tuples,
                nodes,
                budget,
            )?;
            sizes[c] -= 1;
            colors[next] = usize::MAX;
        }
    }
    Ok(())
}

/// One optimal coloring whose smallest class attains sigma, as class lists
/// sorted by size ascending (class 0 is a sigma-class).
pub fn sigma_coloring(h: &Graph) -> Result<Vec<Vec<usize>>> {
    let profile = smallest_color_class(h)?;
    let chi = profile.chi;
    let mut colors = vec![usize::MAX; h.n()];
    let mut best: Option<Vec<Vec<usize>>> = None;
    find_sigma_coloring(h, chi, profile.sigma, &mut colors, 0, 0, &mut best);
    best.ok_or_else(|| Error::Lemma("sigma witness coloring must exist".into()))
}

fn find_sigma_coloring(
    h: &Graph,
    chi: usize,
    sigma: usize,
    colors: &mut [usize],
    next: usize,
    max_used: usize,
    best: &mut Option<Vec<Vec<usize>>>,
) {
    if best.is_some() {
        return;
    }
    if next == h.n() {
        if max_used == chi {
            let mut classes = vec![Vec::new(); chi];
            for (v, &c) in colors.iter().enumerate() {
                classes[c].push(v);
            }
            classes.sort_by_key(|c| c.len());
            if classes[0].len() == sigma {
                *best = Some(classes);
            }
        }
        return;
    }
    for c in 0..chi.min(max_used + 1) {
        if h.neighbors(next).iter().all(|&u| colors[u] != c) {
            colors[next] = c;
            find_sigma_coloring(h, chi, sigma, colors, next + 1, max_used.max(c + 1), best);
            colors[next] = usize::MAX;
        }
    }
}

/// chi_cr(H) = (chi(H) - 1) |H| / (|H| - sigma(H)), exact.
pub fn chi_critical(h: &Graph) -> Result<Rational> {
    if h.edge_count() == 0 {
        return Err(Error::Precondition("chi_cr undefined for edgeless H".into()));
    }
    let profile = smallest_color_class(h)?;
    Ok(chi_critical_from(profile.chi, h.n(), profile.sigma))
}

pub fn chi_critical_from(chi: usize, h_order: usize, sigma: usize) -> Rational {
    rat_usize(chi - 1) * rat_usize(h_order) / rat_usize(h_order - sigma)
}

/// Ore threshold `2 (1 - 1/chi_cr(H)) n`, exact.
pub fn ore_threshold(h: &Graph, n: usize) -> Result<Rational> {
    let chi_cr = chi_critical(h)?;
    Ok(ore_threshold_from(&chi_cr, n))
}

pub fn ore_threshold_from(chi_cr: &Rational, n: usize) -> Rational {
    rat_int(2) * (Rational::one() - chi_cr.recip()) * rat_usize(n)
}

/// gamma = alpha / ((k-1)(k-1+alpha)).
pub fn gamma_param(k: usize, alpha: &Rational) -> Rational {
    assert!(k >= 2);
    alpha / (rat_usize(k - 1) * (rat_usize(k - 1) + alpha))
}

/// A k-partite bottle graph: neck sigma, width omega, parts (sigma, omega, ..., omega).
#[derive(Clone, Debug, PartialEq)]
pub struct BottleSpec {
    pub k: usize,
    pub sigma: usize,
    pub omega: usize,
    pub alpha: Rational,
    pub chi_cr: Rational,
    pub color_vector: Vec<Rational>,
}

impl BottleSpec {
    pub fn new(k: usize, sigma: usize, omega: usize) -> Result<Self> {
        if k < 2 || sigma < 1 || sigma > omega {
            return Err(Error::Precondition(format!(
                "invalid bottle parameters k={k} sigma={sigma} omega={omega}"
            )));
        }
        let alpha = rat_usize(sigma) / rat_usize(omega);
        let chi_cr = rat_usize(k - 1) + &alpha;
        let mut color_vector = vec![&alpha / &chi_cr];
        color_vector.extend(std::iter::repeat(chi_cr.recip()).take(k - 1));
        Ok(BottleSpec { k, sigma, omega, alpha, chi_cr, color_vector })
    }

    pub fn order(&self) -> usize {
        self.sigma + (self.k - 1) * self.omega
    }

    pub fn gamma(&self) -> Rational {
        gamma_param(self.k, &self.alpha)
    }

    pub fn is_balanced(&self) -> bool {
        self.sigma == self.omega
    }

    pub fn graph(&self) -> Graph {
        bottle_graph(self.k, self.sigma, self.omega).expect("validated at construction")
    }
}

/// Complete k-partite graph with parts (sigma, omega, ..., omega).
pub fn bottle_graph(k: usize, sigma: usize, omega: usize) -> Result<Graph> {
    if k < 2 || sigma < 1 || sigma > omega {
        return Err(Error::Precondition(format!(
            "invalid bottle parameters k={k} sigma={sigma} omega={omega}"
        )));
    }
    let mut sizes = vec![sigma];
    sizes.extend(std::iter::repeat(omega).take(k - 1));
    Graph::complete_multipartite(&sizes)
}

/// Part index lists of the bottle graph, neck first.
pub fn bottle_parts(spec: &BottleSpec) -> Vec<Vec<usize>> {
    let mut sizes = vec![spec.sigma];
    sizes.extend(std::iter::repeat(spec.omega).take(spec.k - 1));
    Graph::multipartite_parts(&sizes)
}

/// The bottle graph of H: the smallest bottle with H's exact color vector
/// that provably contains an H-factor. Minimum order; the exact color vector
/// pins sigma:omega, so the minimal-order candidate is unique.
///
/// Candidates are scanned in increasing order; the cyclic-shift construction
/// guarantees a hit at order (k-1)|H| or earlier, and each candidate's
/// H-factor is verified with the exact tiling solver.
pub fn bottle_of(h: &Graph) -> Result<(BottleSpec, Graph)> {
    bottle_of_budgeted(h, 20_000_000)
}

pub fn bottle_of_budgeted(h: &Graph, factor_budget: u64) -> Result<(BottleSpec, Graph)> {
    if h.edge_count() == 0 {
        return Err(Error::Precondition("bottle graph undefined for edgeless H".into()));
    }
    if h.n() > MAX_H {
        return Err(Error::Precondition(format!("|H| = {} exceeds desk cap {MAX_H}", h.n())));
    }
    let profile = smallest_color_class(h)?;
    let (k, sigma, n) = (profile.chi, profile.sigma, h.n());
    // The color vector (s, t, ..., t) with s = sigma/h pins the neck:width
    // ratio at sigma(k-1) : (h - sigma); scaling the reduced base ratio
    // enumerates every bottle with the exact vector in increasing order.
    let g = gcd(sigma * (k - 1), n - sigma);
    let (base_sigma, base_omega) = ((sigma * (k - 1)) / g, (n - sigma) / g);
    for m in 1..=g {
        // order m(k-1)h/g must be divisible by |H| for a factor to exist
        if (m * (k - 1)) % g != 0 {
            continue;
        }
        let spec = BottleSpec::new(k, m * base_sigma, m * base_omega)?;
        let bottle = spec.graph();
        match crate::tiling::has_factor(&bottle, h, factor_budget)? {
            crate::tiling::FactorStatus::Yes(_) => return Ok((spec, bottle)),
            crate::tiling::FactorStatus::No => continue,
            crate::tiling::FactorStatus::Unknown => {
                return Err(Error::Budget(format!(
                    "factor search on bottle of order {} inconclusive",
                    spec.order()
                )))
            }
        }
    }
    // m = g is the cyclic-shift bottle of order (k-1)h, which always has an
    // H-factor; reaching this point means the solver contradicted it.
    Err(Error::Lemma(format!(
        "no bottle with the exact color vector up to order {} contains an H-factor",
        (k - 1) * n
    )))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    #[test]
    fn chi_basics() {
        assert_eq!(chromatic_number(&Graph::complete(4)).unwrap(), 4);
        assert_eq!(chromatic_number(&Graph::cycle(5)).unwrap(), 3);
        assert_eq!(chromatic_number(&Graph::cycle(6)).unwrap(), 2);
        assert_eq!(chromatic_number(&Graph::petersen()).unwrap(), 3);
    }

    #[test]
    fn sigma_c5() {
        let p = smallest_color_class(&Graph::cycle(5)).unwrap();
        assert_eq!(p.chi, 3);
        assert_eq!(p.sigma, 1);
        assert_eq!(p.optimal_class_size_multisets, vec![vec![1, 2, 2]]);
    }

    #[test]
    fn sigma_star_and_balanced_bottle() {
        let p = smallest_color_class(&Graph::star(2)).unwrap();
        assert_eq!((p.chi, p.sigma), (2, 1));
        let p = smallest_color_class(&Graph::complete_multipartite(&[2, 2, 2]).unwrap()).unwrap();
        assert_eq!((p.chi, p.sigma), (3, 2));
        assert_eq!(p.optimal_class_size_multisets, vec![vec![2, 2, 2]]);
    }

    #[test]
    fn chi_critical_values() {
        assert_eq!(chi_critical(&Graph::complete(4)).unwrap(), rat_int(4));
        assert_eq!(chi_critical(&Graph::star(2)).unwrap(), rat(3, 2));
        assert_eq!(chi_critical(&Graph::cycle(5)).unwrap(), rat(5, 2));
        assert!(chi_critical(&Graph::empty(3)).is_err());
    }

    #[test]
    fn chi_critical_range_property() {
        // chi - 1 < chi_cr <= chi, equality iff every optimal coloring balanced
        for h in [
            Graph::complete(3),
            Graph::cycle(5),
            Graph::cycle(7),
            Graph::path(4),
            Graph::star(3),
            Graph::petersen(),
            Graph::complete_multipartite(&[1, 2, 2]).unwrap(),
        ] {
            let profile = smallest_color_class(&h).unwrap();
            let cr = chi_critical(&h).unwrap();
            assert!(rat_usize(profile.chi - 1) < cr);
            assert!(cr <= rat_usize(profile.chi));
            let balanced = profile
                .optimal_class_size_multisets
                .iter()
                .all(|t| t.iter().all(|&s| s == t[0]));
            assert_eq!(cr == rat_usize(profile.chi), balanced);
        }
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_param(3, &rat(1, 2)), rat(1, 10));
        assert_eq!(gamma_param(2, &rat(1, 1)), rat(1, 2));
        // identity 1 - 1/(k-1+a) = 1 - 1/(k-1) + gamma
        for (k, a) in [(2usize, rat(1, 3)), (3, rat(2, 5)), (4, rat(1, 1)), (5, rat(3, 7))] {
            let lhs = rat_int(1) - (rat_usize(k - 1) + &a).recip();
            let rhs = rat_int(1) - rat_usize(k - 1).recip() + gamma_param(k, &a);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ore_threshold_values() {
        assert_eq!(ore_threshold(&Graph::complete(3), 9).unwrap(), rat_int(12));
        assert_eq!(ore_threshold(&Graph::star(2), 30).unwrap(), rat_int(20));
        // K_2 recovers the Ore bound d(x)+d(y) >= n
        assert_eq!(ore_threshold(&Graph::complete(2), 17).unwrap(), rat_int(17));
    }

    #[test]
    fn bottle_spec_sanity() {
        let spec = BottleSpec::new(3, 1, 2).unwrap();
        assert_eq!(spec.chi_cr, rat(5, 2));
        assert_eq!(spec.order(), 5);
        let sum: Rational = spec.color_vector.iter().sum();
        assert_eq!(sum, rat_int(1));
        assert_eq!(BottleSpec::new(2, 1, 1).unwrap().chi_cr, rat_int(2));
        assert_eq!(BottleSpec::new(3, 2, 2).unwrap().chi_cr, rat_int(3));
        assert!(BottleSpec::new(3, 3, 2).is_err());
    }

    #[test]
    fn bottle_graph_matches_formula() {
        for (k, s, w) in [(3, 1, 2), (2, 1, 1), (3, 2, 2), (4, 1, 3)] {
            let g = bottle_graph(k, s, w).unwrap();
            let cr = chi_critical(&g).unwrap();
            assert_eq!(cr, rat_usize(k - 1) + rat_usize(s) / rat_usize(w));
        }
    }
}

//! Maximal k-clique-covers and their structure: the lexicographic-maximum
//! search, the merge step driven by Hall-violator certificates, the
//! well/over/under connection trichotomy, the A/B partition, phi-vectors,
//! and the proposition audit.
//!
//! Exact mode (n <= 12) computes the true lexicographic maximum by dynamic
//! programming over vertex-subset masks. Heuristic mode is a merge-stable
//! fixed point and is explicitly labeled uncertified: properties quantified
//! over maximal covers are only asserted on certified covers.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::{complement_perfect_matching, ComplementMatching};
use crate::ratio::{rat_usize, Rational};
use num::traits::One;
use std::collections::HashMap;

/// Partition of V(G) into cliques of order at most k, families ordered by
/// decreasing clique order.
#[derive(Clone, Debug)]
pub struct CliqueCover {
    pub k: usize,
    pub n: usize,
    /// `families[d]` holds the cliques of order `k - d` (sorted vertex lists).
    families: Vec<Vec<Vec<usize>>>,
    /// True iff produced by the exhaustive lexicographic maximization.
    pub certified: bool,
}

impl CliqueCover {
    pub fn new(g: &Graph, k: usize, mut cliques: Vec<Vec<usize>>, certified: bool) -> Result<Self> {
        let mut seen = vec![false; g.n()];
        let mut families = vec![Vec::new(); k];
        for c in &mut cliques {
            c.sort_unstable();
            if c.is_empty() || c.len() > k {
                return Err(Error::Precondition(format!("clique size {} outside [1,{k}]", c.len())));
            }
            if !g.is_clique(c) {
                return Err(Error::Precondition(format!("{c:?} is not a clique")));
            }
            for &v in c.iter() {
                if seen[v] {
                    return Err(Error::Precondition(format!("vertex {v} covered twice")));
                }
                seen[v] = true;
            }
            families[k - c.len()].push(c.clone());
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Precondition("cover does not span V(G)".into()));
        }
        for f in &mut families {
            f.sort();
        }
        Ok(CliqueCover { k, n: g.n(), families, certified })
    }

    /// Cliques of order `i`.
    pub fn family(&self, i: usize) -> &[Vec<usize>] {
        &self.families[self.k - i]
    }

    /// All cliques, largest order first.
    pub fn all_cliques(&self) -> Vec<&Vec<usize>> {
        self.families.iter().flatten().collect()
    }

    /// (|Phi_k|, |Phi_{k-1}|, ..., |Phi_1|).
    pub fn signature(&self) -> Vec<usize> {
        self.families.iter().map(|f| f.len()).collect()
    }

    /// Serialization: one line per clique, `i: v1 v2 ... vi`, families in
    /// decreasing order of i.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (d, f) in self.families.iter().enumerate() {
            let order = self.k - d;
            for c in f {
                let verts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("{order}: {}\n", verts.join(" ")));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverMode {
    Exact,
    Heuristic,
}

/// Maximal k-clique-cover. Exact mode (n <= 12) produces the certified
/// lexicographic maximum; heuristic mode returns a merge-stable cover with
/// `certified = false`.
pub fn maximal_clique_cover(g: &Graph, k: usize, mode: CoverMode, budget: u64) -> Result<CliqueCover> {
    if k < 2 {
        return Err(Error::Precondition("cover order k must be at least 2".into()));
    }
    match mode {
        CoverMode::Exact => exact_cover(g, k, budget),
        CoverMode::Heuristic => heuristic_cover(g, k),
    }
}

fn exact_cover(g: &Graph, k: usize, budget: u64) -> Result<CliqueCover> {
    let n = g.n();
    if n > 12 {
        return Err(Error::Precondition(format!("exact cover capped at n <= 12, got {n}")));
    }
    if n == 0 {
        return CliqueCover::new(g, k, Vec::new(), true);
    }
    let full: u32 = (1u32 << n) - 1;
    let mut memo: HashMap<u32, (Vec<usize>, u32)> = HashMap::new();
    let mut nodes = 0u64;
    best_signature(g, k, full, &mut memo, &mut nodes, budget)?;
    // reconstruct
    let mut cliques = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let &(_, choice) = memo.get(&mask).expect("memoized");
        cliques.push((0..n).filter(|&v| choice >> v & 1 == 1).collect::<Vec<_>>());
        mask &= !choice;
    }
    CliqueCover::new(g, k, cliques, true)
}

fn best_signature(
    g: &Graph,
    k: usize,
    mask: u32,
    memo: &mut HashMap<u32, (Vec<usize>, u32)>,
    nodes: &mut u64,
    budget: u64,
) -> Result<Vec<usize>> {
    if mask == 0 {
        return Ok(vec![0; k]);
    }
    if let Some((sig, _)) = memo.get(&mask) {
        return Ok(sig.clone());
    }
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::Budget(format!("exact cover search exceeded {budget} nodes")));
    }
    let v = mask.trailing_zeros() as usize;
    let mut best: Option<(Vec<usize>, u32)> = None;
    // every clique through the lowest uncovered vertex, sizes 1..=k
    let mut cliques: Vec<u32> = Vec::new();
    collect_cliques(g, k, mask, 1u32 << v, v, &mut cliques);
    for choice in cliques {
        let mut sig = best_signature(g, k, mask & !choice, memo, nodes, budget)?;
        let size = choice.count_ones() as usize;
        sig[k - size] += 1;
        if best.as_ref().map_or(true, |(b, _)| sig > *b) {
            best = Some((sig, choice));
        }
    }
    let (sig, choice) = best.expect("the singleton clique is always available");
    memo.insert(mask, (sig.clone(), choice));
    Ok(sig)
}

fn collect_cliques(g: &Graph, k: usize, mask: u32, current: u32, last: usize, out: &mut Vec<u32>) {
    out.push(current);
    if current.count_ones() as usize == k {
        return;
    }
    for u in last + 1..g.n() {
        if mask >> u & 1 == 1 {
            let ok = (0..g.n()).filter(|&w| current >> w & 1 == 1).all(|w| g.has_edge(w, u));
            if ok {
                collect_cliques(g, k, mask, current | 1 << u, u, out);
            }
        }
    }
}

fn heuristic_cover(g: &Graph, k: usize) -> Result<CliqueCover> {
    // greedy large-clique extraction, then run the merge step to a fixed point
    let mut alive: Vec<usize> = (0..g.n()).collect();
    let mut cliques = Vec::new();
    while !alive.is_empty() {
        let c = greedy_clique_in(g, &alive, k);
        alive.retain(|v| !c.contains(v));
        cliques.push(c);
    }
    let mut cover = CliqueCover::new(g, k, cliques, false)?;
    while let Some(next) = merge_step(g, &cover)? {
        cover = next;
    }
    Ok(cover)
}

/// Largest clique found by greedy growth from each seed, capped at `size_cap`;
/// deterministic (lowest seed wins ties).
fn greedy_clique_in(g: &Graph, alive: &[usize], size_cap: usize) -> Vec<usize> {
    let mut best: Vec<usize> = vec![alive[0]];
    for &seed in alive {
        let mut clique = vec![seed];
        for &v in alive {
            if clique.len() == size_cap {
                break;
            }
            if v != seed && clique.iter().all(|&u| g.has_edge(u, v)) {
                clique.push(v);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best.sort_unstable();
    best
}

/// One merge step: if some same-order pair K, K' in a family below k admits
/// no complement perfect matching, the Hall violator yields a clique S u T
/// of order > i; replacing K and K' by an (i+1)-subclique Q (fallout
/// re-packed greedily) produces a strictly lexicographically larger cover.
/// `None` means every pair matches (a fixed point).
pub fn merge_step(g: &Graph, cover: &CliqueCover) -> Result<Option<CliqueCover>> {
    for i in (1..cover.k).rev() {
        let family = cover.family(i);
        for p in 0..family.len() {
            for q in p + 1..family.len() {
                let outcome = complement_perfect_matching(g, &family[p], &family[q])?;
                let ComplementMatching::Violator { s, neighborhood } = outcome else {
                    continue;
                };
                // T = K' minus the complement-neighborhood of S; S u T is a
                // clique bigger than i
                let t: Vec<usize> =
                    family[q].iter().copied().filter(|v| !neighborhood.contains(v)).collect();
                let mut st: Vec<usize> = s.iter().copied().chain(t.iter().copied()).collect();
                st.sort_unstable();
                if !g.is_clique(&st) || st.len() <= i {
                    return Err(Error::Lemma(format!(
                        "violator certificate did not produce a clique above order {i}"
                    )));
                }
                let q_clique: Vec<usize> = st[..i + 1].to_vec();
                let fallout: Vec<usize> = family[p]
                    .iter()
                    .chain(family[q].iter())
                    .copied()
                    .filter(|v| !q_clique.contains(v))
                    .collect();
                let mut cliques: Vec<Vec<usize>> = Vec::new();
                for (d, f) in cover.families.iter().enumerate() {
                    let order = cover.k - d;
                    for c in f {
                        if order == i && (c == &family[p] || c == &family[q]) {
                            continue;
                        }
                        cliques.push(c.clone());
                    }
                }
                cliques.push(q_clique);
                // re-pack the fallout greedily instead of leaving singletons
                let mut rest = fallout;
                while !rest.is_empty() {
                    let c = greedy_clique_in(g, &rest, cover.k);
                    rest.retain(|v| !c.contains(v));
                    cliques.push(c);
                }
                let merged = CliqueCover::new(g, cover.k, cliques, false)?;
                if merged.signature() <= cover.signature() {
                    return Err(Error::Lemma(
                        "merge step failed to increase the signature".into(),
                    ));
                }
                return Ok(Some(merged));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    Well,
    Over,
    Under,
}

/// Trichotomy of e(K^i, K^j) against i(j-1), with the exact edge count.
#[derive(Clone, Debug)]
pub struct ConnectionClass {
    pub kind: ConnectionKind,
    pub edges: usize,
}

pub fn classify_connection(g: &Graph, ki: &[usize], kj: &[usize]) -> Result<ConnectionClass> {
    let (i, j) = (ki.len(), kj.len());
    if i > j {
        return Err(Error::Precondition("expected |K^i| <= |K^j|".into()));
    }
    if !g.is_clique(ki) || !g.is_clique(kj) {
        return Err(Error::Precondition("connection classes are defined on cliques".into()));
    }
    if ki.iter().any(|v| kj.contains(v)) {
        return Err(Error::Precondition("cliques overlap".into()));
    }
    let edges = g.edges_between(ki, kj);
    let well = ki.iter().all(|&v| kj.iter().filter(|&&u| g.has_edge(v, u)).count() == j - 1);
    let kind = if well {
        ConnectionKind::Well
    } else if edges >= i * (j - 1) {
        ConnectionKind::Over
    } else {
        ConnectionKind::Under
    };
    Ok(ConnectionClass { kind, edges })
}

/// The A/B partition of K^j against two same-order cliques at the critical
/// edge count i(j-1): A holds the vertices with i-1 neighbors in K_1, B the
/// fully-adjacent ones; the split must agree with K_2 as well. A violated
/// degree pattern is a lemma failure (it must never occur on certified
/// maximal covers).
pub fn ab_partition(
    g: &Graph,
    k1: &[usize],
    k2: &[usize],
    kj: &[usize],
) -> Result<(Vec<usize>, Vec<usize>)> {
    let i = k1.len();
    let j = kj.len();
    if k2.len() != i {
        return Err(Error::Precondition("K_1 and K_2 must have the same order".into()));
    }
    if i > j {
        return Err(Error::Precondition("expected |K_1| <= |K^j|".into()));
    }
    for (a, b) in [(k1, k2), (k1, kj), (k2, kj)] {
        if a.iter().any(|v| b.contains(v)) {
            return Err(Error::Precondition("cliques overlap".into()));
        }
    }
    if !(g.is_clique(k1) && g.is_clique(k2) && g.is_clique(kj)) {
        return Err(Error::Precondition("A/B partition is defined on cliques".into()));
    }
    let crit = i * (j - 1);
    if g.edges_between(k1, kj) != crit || g.edges_between(k2, kj) != crit {
        return Err(Error::Precondition(format!(
            "edge counts must both equal i(j-1) = {crit}"
        )));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &v in kj {
        let d1 = g.degree_in_slice(v, k1);
        let d2 = g.degree_in_slice(v, k2);
        if d1 != d2 {
            return Err(Error::Lemma(format!(
                "vertex {v} disagrees across K_1/K_2: {d1} vs {d2}"
            )));
        }
        if d1 == i - 1 {
            a.push(v);
        } else if d1 == i {
            b.push(v);
        } else {
            return Err(Error::Lemma(format!(
                "vertex {v} has degree {d1} into K_1; expected i-1 or i"
            )));
        }
    }
    if a.len() != i || b.len() != j - i {
        return Err(Error::Lemma(format!(
            "partition sizes |A| = {}, |B| = {} differ from (i, j-i) = ({i}, {})",
            a.len(),
            b.len(),
            j - i
        )));
    }
    Ok((a, b))
}

/// phi_i = |Phi_i| / ell, returned largest order first; checks the cover
/// spans `ell` vertices and that the sum of i*phi_i is exactly 1.
pub fn phi_vector(cover: &CliqueCover, ell: usize) -> Result<Vec<Rational>> {
    let mass: usize = cover.signature().iter().enumerate().map(|(d, c)| (cover.k - d) * c).sum();
    if mass != ell {
        return Err(Error::Precondition(format!(
            "cover spans {mass} vertices, not ell = {ell}"
        )));
    }
    let phis: Vec<Rational> =
        cover.signature().iter().map(|&c| rat_usize(c) / rat_usize(ell)).collect();
    let total: Rational =
        phis.iter().enumerate().map(|(d, p)| rat_usize(cover.k - d) * p).sum();
    if !total.is_one() {
        return Err(Error::Lemma("sum of i*phi_i must be 1 on a spanning cover".into()));
    }
    Ok(phis)
}

/// One audited proposition: pass iff no failure witnesses.
#[derive(Clone, Debug, Default)]
pub struct CheckOutcome {
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Structured audit of a cover against the maximal-cover propositions.
/// Uncertified covers make the audit advisory.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub advisory: bool,
    /// Does G satisfy the Ore bound 2(1 - 1/(k-1) + gamma - d - 2eps) ell?
    pub ore_hypothesis_holds: bool,
    /// e(K^i, K^j) <= i(j-1) for i <= j < k, equality forcing the
    /// well-connected pattern.
    pub edge_cap: CheckOutcome,
    /// Any k same-order cliques against a K^k: group sum <= i k (k-1).
    pub group_cap: CheckOutcome,
    /// A/B partition exists wherever both edge counts hit i(j-1), with
    /// pairwise-distinct misses into K_1.
    pub ab_partitions: CheckOutcome,
    /// Degree-sum lower bound for same-order clique groups (meaningful only
    /// under the Ore hypothesis).
    pub degree_sum: CheckOutcome,
    /// Complement perfect matchings between all same-order pairs below k.
    pub matchings: CheckOutcome,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.edge_cap.pass()
            && self.group_cap.pass()
            && self.ab_partitions.pass()
            && self.matchings.pass()
            && (!self.ore_hypothesis_holds || self.degree_sum.pass())
    }
}

pub fn audit_cover(
    g: &Graph,
    cover: &CliqueCover,
    gamma: &Rational,
    d: &Rational,
    eps: &Rational,
) -> Result<AuditReport> {
    let k = cover.k;
    let ell = g.n();
    if k < 2 {
        return Err(Error::Precondition("audit needs k >= 2".into()));
    }
    let threshold = (Rational::one() - rat_usize(k - 1).recip() + gamma - d - rat_usize(2) * eps)
        * rat_usize(ell);
    let ore = crate::graph::ore_report_with_threshold(g, rat_usize(2) * &threshold);
    let mut report = AuditReport {
        advisory: !cover.certified,
        ore_hypothesis_holds: ore.satisfied(),
        edge_cap: CheckOutcome::default(),
        group_cap: CheckOutcome::default(),
        ab_partitions: CheckOutcome::default(),
        degree_sum: CheckOutcome::default(),
        matchings: CheckOutcome::default(),
    };

    // edge cap and well-connectivity at equality, ordered pairs i <= j < k
    for i in 1..k {
        for j in i..k {
            for ki in cover.family(i) {
                for kj in cover.family(j) {
                    if ki == kj {
                        continue;
                    }
                    let e = g.edges_between(ki, kj);
                    if e > i * (j - 1) {
                        report
                            .edge_cap
                            .failures
                            .push(format!("e({ki:?}, {kj:?}) = {e} > {}", i * (j - 1)));
                    } else if e == i * (j - 1) {
                        let cc = classify_connection(g, ki, kj)?;
                        if cc.kind != ConnectionKind::Well {
                            report.edge_cap.failures.push(format!(
                                "e({ki:?}, {kj:?}) = i(j-1) without the uniform pattern"
                            ));
                        }
                    }
                }
            }
        }
    }

    // group cap: the k heaviest order-i cliques against each K^k
    for i in 1..k {
        let fam = cover.family(i);
        if fam.len() < k {
            continue;
        }
        for kk in cover.family(k) {
            let mut counts: Vec<usize> = fam.iter().map(|c| g.edges_between(c, kk)).collect();
            counts.sort_unstable_by(|a, b| b.cmp(a));
            let top: usize = counts[..k].iter().sum();
            if top > i * k * (k - 1) {
                report.group_cap.failures.push(format!(
                    "k heaviest order-{i} cliques against {kk:?} sum to {top} > {}",
                    i * k * (k - 1)
                ));
            }
        }
    }

    // A/B partitions wherever a same-order pair hits the critical count
    for i in 1..k {
        let fam = cover.family(i);
        for j in i..k {
            for kj in cover.family(j) {
                for p in 0..fam.len() {
                    if fam[p] == *kj {
                        continue;
                    }
                    for q in p + 1..fam.len() {
                        if fam[q] == *kj {
                            continue;
                        }
                        let crit = i * (j - 1);
                        if g.edges_between(&fam[p], kj) != crit
                            || g.edges_between(&fam[q], kj) != crit
                        {
                            continue;
                        }
                        match ab_partition(g, &fam[p], &fam[q], kj) {
                            Ok((a, _b)) => {
                                // misses into K_1 must form a perfect matching
                                let mut missed: Vec<usize> = Vec::new();
                                for &v in &a {
                                    for &u in &fam[p] {
                                        if !g.has_edge(v, u) {
                                            missed.push(u);
                                        }
                                    }
                                }
                                missed.sort_unstable();
                                let before = missed.len();
                                missed.dedup();
                                if missed.len() != before || before != i {
                                    report.ab_partitions.failures.push(format!(
                                        "misses of A({kj:?}) into {:?} not a perfect matching",
                                        fam[p]
                                    ));
                                }
                            }
                            Err(Error::Lemma(msg)) => {
                                report.ab_partitions.failures.push(msg);
                            }
                            Err(other) => return Err(other),
                        }
                    }
                }
            }
        }
    }

    // degree-sum lower bound: every p-subset of a family has
    // e(union, G) >= p i t; the binding subsets are the p lightest
    for i in 1..k {
        let fam = cover.family(i);
        if fam.len() < 2 {
            continue;
        }
        let mut sums: Vec<usize> = fam.iter().map(|c| g.edges_to_all(c)).collect();
        sums.sort_unstable();
        let mut acc = 0usize;
        for (idx, s) in sums.iter().enumerate() {
            acc += s;
            let p = idx + 1;
            if p < 2 {
                continue;
            }
            if rat_usize(acc) < rat_usize(p * i) * &threshold {
                report.degree_sum.failures.push(format!(
                    "{p} lightest order-{i} cliques have degree sum {acc} < p*i*t"
                ));
            }
        }
    }

    // complement perfect matchings between same-order pairs below k
    for i in 1..k {
        let fam = cover.family(i);
        for p in 0..fam.len() {
            for q in p + 1..fam.len() {
                if let ComplementMatching::Violator { s, .. } =
                    complement_perfect_matching(g, &fam[p], &fam[q])?
                {
                    report.matchings.failures.push(format!(
                        "no complement matching between {:?} and {:?} (violator {s:?})",
                        fam[p], fam[q]
                    ));
                }
            }
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, rat_int};

    fn two_triangles() -> Graph {
        let mut g = Graph::empty(6);
        for base in [0, 3] {
            g.add_edge(base, base + 1);
            g.add_edge(base, base + 2);
            g.add_edge(base + 1, base + 2);
        }
        g
    }

    #[test]
    fn exact_cover_two_triangles() {
        let g = two_triangles();
        let cover = maximal_clique_cover(&g, 4, CoverMode::Exact, 1 << 20).unwrap();
        assert_eq!(cover.signature(), vec![0, 2, 0, 0]);
        assert!(cover.certified);
    }

    #[test]
    fn exact_cover_c5() {
        let cover = maximal_clique_cover(&Graph::cycle(5), 3, CoverMode::Exact, 1 << 20).unwrap();
        assert_eq!(cover.signature(), vec![0, 2, 1]);
    }

    #[test]
    fn exact_cover_k5_capped_at_3() {
        let cover = maximal_clique_cover(&Graph::complete(5), 3, CoverMode::Exact, 1 << 20).unwrap();
        assert_eq!(cover.signature(), vec![1, 1, 0]);
    }

    #[test]
    fn merge_improves_split_k4() {
        // K_4 covered as two K_2s: the merge step must find a K_3
        let g = Graph::complete(4);
        let bad = CliqueCover::new(&g, 3, vec![vec![0, 1], vec![2, 3]], false).unwrap();
        let merged = merge_step(&g, &bad).unwrap().unwrap();
        assert!(merged.signature() > bad.signature());
        assert_eq!(merged.signature()[0], 1);
    }

    #[test]
    fn merge_fixed_points() {
        // exact maximal covers are merge fixed points
        let g = Graph::cycle(5);
        let cover = maximal_clique_cover(&g, 3, CoverMode::Exact, 1 << 20).unwrap();
        assert!(merge_step(&g, &cover).unwrap().is_none());
        // two K_2s with complete complement between them: matching exists
        let mut h = Graph::empty(4);
        h.add_edge(0, 1);
        h.add_edge(2, 3);
        let cover = CliqueCover::new(&h, 3, vec![vec![0, 1], vec![2, 3]], false).unwrap();
        assert!(merge_step(&h, &cover).unwrap().is_none());
    }

    #[test]
    fn merge_iteration_terminates_and_heuristic_is_stable() {
        let g = Graph::random(14, &rat(3, 5), 2).unwrap();
        let cover = maximal_clique_cover(&g, 3, CoverMode::Heuristic, 0).unwrap();
        assert!(!cover.certified);
        assert!(merge_step(&g, &cover).unwrap().is_none());
    }

    #[test]
    fn connection_trichotomy() {
        // K^1 = {v} with j-1 neighbors in K^j: well
        let mut g = Graph::empty(4);
        g.add_edge(1, 2);
        g.add_edge(1, 3);
        g.add_edge(2, 3);
        g.add_edge(0, 1);
        g.add_edge(0, 2);
        let cc = classify_connection(&g, &[0], &[1, 2, 3]).unwrap();
        assert_eq!(cc.kind, ConnectionKind::Well);
        assert_eq!(cc.edges, 2);
        // adjacent to all j: over
        g.add_edge(0, 3);
        let cc = classify_connection(&g, &[0], &[1, 2, 3]).unwrap();
        assert_eq!(cc.kind, ConnectionKind::Over);
        // no edges: under
        let e = Graph::from_edges(3, &[(1, 2)]).unwrap();
        let cc = classify_connection(&e, &[0], &[1, 2]).unwrap();
        assert_eq!(cc.kind, ConnectionKind::Under);
        assert_eq!(cc.edges, 0);
    }

    #[test]
    fn ab_partition_same_order_means_b_empty() {
        // K1 = {0,1}, K2 = {2,3}, Kj = {4,5}; i = j = 2, crit = 2
        let mut g = Graph::empty(6);
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        g.add_edge(4, 5);
        g.add_edge(4, 0);
        g.add_edge(5, 1);
        g.add_edge(4, 2);
        g.add_edge(5, 3);
        let (a, b) = ab_partition(&g, &[0, 1], &[2, 3], &[4, 5]).unwrap();
        assert_eq!(a, vec![4, 5]);
        assert!(b.is_empty());
    }

    #[test]
    fn ab_partition_flags_bad_pattern() {
        // vertex 4 gets two neighbors in K1, vertex 5 gets zero: sum still 2
        let mut g = Graph::empty(6);
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        g.add_edge(4, 5);
        g.add_edge(4, 0);
        g.add_edge(4, 1);
        g.add_edge(4, 2);
        g.add_edge(5, 3);
        let err = ab_partition(&g, &[0, 1], &[2, 3], &[4, 5]).unwrap_err();
        assert!(matches!(err, Error::Lemma(_)));
    }

    #[test]
    fn phi_vector_examples() {
        let cover = maximal_clique_cover(&Graph::cycle(5), 3, CoverMode::Exact, 1 << 20).unwrap();
        let phi = phi_vector(&cover, 5).unwrap();
        assert_eq!(phi, vec![rat_int(0), rat(2, 5), rat(1, 5)]);
        // single K_k covering K_k
        let cover = maximal_clique_cover(&Graph::complete(3), 3, CoverMode::Exact, 1 << 20).unwrap();
        let phi = phi_vector(&cover, 3).unwrap();
        assert_eq!(phi[0], rat(1, 3));
        assert!(phi_vector(&cover, 4).is_err());
    }

    #[test]
    fn audit_passes_on_certified_small_cover() {
        let g = two_triangles();
        let cover = maximal_clique_cover(&g, 3, CoverMode::Exact, 1 << 20).unwrap();
        let report = audit_cover(&g, &cover, &rat(1, 10), &rat_int(0), &rat_int(0)).unwrap();
        assert!(report.edge_cap.pass());
        assert!(report.group_cap.pass());
        assert!(report.ab_partitions.pass());
        assert!(report.matchings.pass());
        assert!(!report.advisory);
    }

    #[test]
    fn cover_text_format() {
        let g = two_triangles();
        let cover = maximal_clique_cover(&g, 3, CoverMode::Exact, 1 << 20).unwrap();
        let text = cover.to_text();
        assert_eq!(text, "3: 0 1 2\n3: 3 4 5\n");
    }

    #[test]
    fn invalid_covers_rejected() {
        let g = Graph::cycle(4);
        assert!(CliqueCover::new(&g, 3, vec![vec![0, 2]], false).is_err()); // not a clique
        assert!(CliqueCover::new(&g, 3, vec![vec![0, 1]], false).is_err()); // not spanning
        assert!(CliqueCover::new(&g, 3, vec![vec![0, 1], vec![1, 2], vec![3]], false).is_err());
    }
}

//! Exact and heuristic H-tilings.
//!
//! The exact solver is a branch-and-bound over H-copies: branch on the
//! lowest-id undecided vertex, either assigning it to a copy through it or
//! discarding it (discard branch last), with ties among copies broken by
//! lexicographic vertex order. Budgets are measured in search-tree nodes so
//! test outcomes are machine-independent.

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ratio::{rat_int, rat_usize};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Desk cap on the pattern order for copy enumeration.
pub const MAX_PATTERN: usize = 12;

/// Internal cap on the number of enumerated copies before truncation.
const ENUMERATION_LIMIT: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct TilingResult {
    /// Vertex sets, each hosting a copy of H, pairwise disjoint, sorted.
    pub copies: Vec<Vec<usize>>,
    /// V(G) minus the union of the copies, ascending.
    pub leftover: Vec<usize>,
    /// True iff the search proved `copies` has maximum cardinality.
    pub optimal: bool,
    pub nodes_explored: u64,
}

impl TilingResult {
    pub fn covered(&self) -> usize {
        self.copies.iter().map(|c| c.len()).sum()
    }
}

fn check_pattern(h: &Graph) -> Result<()> {
    if h.n() == 0 || h.n() > MAX_PATTERN {
        return Err(Error::Precondition(format!(
            "pattern order {} outside [1, {MAX_PATTERN}]",
            h.n()
        )));
    }
    Ok(())
}

/// All vertex sets S with |S| = |H| and H a (spanning) subgraph of G[S],
/// deduplicated, sorted lexicographically. Truncated at `limit`.
pub fn enumerate_copies(g: &Graph, h: &Graph, limit: usize) -> Result<(Vec<Vec<usize>>, bool)> {
    check_pattern(h)?;
    let allowed = bits::from_indices(g.n().max(1), &(0..g.n()).collect::<Vec<_>>());
    let (set, truncated) = enumerate_copy_sets(g, h, &allowed, limit);
    Ok((set.into_iter().collect(), truncated))
}

/// Embedding order: each successive H-vertex maximizes back-adjacency into
/// the already-placed prefix (first vertex: maximum degree).
fn embedding_order(h: &Graph) -> Vec<usize> {
    let n = h.n();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for step in 0..n {
        let mut best = usize::MAX;
        let mut best_key = (0usize, 0usize);
        for v in 0..n {
            if placed[v] {
                continue;
            }
            let back = order.iter().filter(|&&u| h.has_edge(u, v)).count();
            let key = (back, h.degree(v));
            if best == usize::MAX || key > best_key {
                best = v;
                best_key = key;
            }
        }
        placed[best] = true;
        order.push(best);
        let _ = step;
    }
    order
}

/// Copy sets inside the `allowed` bitset; returns (sets, truncated).
fn enumerate_copy_sets(
    g: &Graph,
    h: &Graph,
    allowed: &[u64],
    limit: usize,
) -> (BTreeSet<Vec<usize>>, bool) {
    let order = embedding_order(h);
    let mut out = BTreeSet::new();
    let mut image = vec![usize::MAX; h.n()];
    let mut used = vec![0u64; allowed.len()];
    let truncated = embed_all(g, h, &order, 0, &mut image, &mut used, allowed, limit, &mut out);
    (out, truncated)
}

#[allow(clippy::too_many_arguments)]
fn embed_all(
    g: &Graph,
    h: &Graph,
    order: &[usize],
    depth: usize,
    image: &mut [usize],
    used: &mut [u64],
    allowed: &[u64],
    limit: usize,
    out: &mut BTreeSet<Vec<usize>>,
) -> bool {
    if out.len() >= limit {
        return true;
    }
    if depth == order.len() {
        let mut set: Vec<usize> = image.to_vec();
        set.sort_unstable();
        out.insert(set);
        return out.len() >= limit;
    }
    let hv = order[depth];
    // candidates: allowed, unused, adjacent to images of all placed H-neighbors
    let mut cand = allowed.to_vec();
    bits::subtract_into(&mut cand, used);
    for &hu in &order[..depth] {
        if h.has_edge(hu, hv) {
            let gu = image[hu];
            for (c, r) in cand.iter_mut().zip(g.row(gu)) {
                *c &= r;
            }
        }
    }
    for gv in bits::to_indices(&cand) {
        image[hv] = gv;
        bits::set(used, gv);
        let stop = embed_all(g, h, order, depth + 1, image, used, allowed, limit, out);
        bits::clear(used, gv);
        image[hv] = usize::MAX;
        if stop {
            return true;
        }
    }
    false
}

/// Independent containment check: does G[set] contain H as a spanning
/// subgraph? Deliberately a separate, simpler matcher (natural vertex order,
/// adjacency matrix on the induced subgraph) so it can audit the solvers.
pub fn verify_copy(g: &Graph, h: &Graph, set: &[usize]) -> bool {
    if set.len() != h.n() {
        return false;
    }
    let mut uniq = set.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() != set.len() {
        return false;
    }
    let k = set.len();
    let mut adj = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            adj[i][j] = i != j && g.has_edge(set[i], set[j]);
        }
    }
    let mut assign = vec![usize::MAX; k];
    let mut taken = vec![false; k];
    fn rec(h: &Graph, adj: &[Vec<bool>], assign: &mut [usize], taken: &mut [bool], v: usize) -> bool {
        if v == assign.len() {
            return true;
        }
        for slot in 0..assign.len() {
            if taken[slot] {
                continue;
            }
            let ok = (0..v).all(|u| !h.has_edge(u, v) || adj[assign[u]][slot]);
            if ok {
                assign[v] = slot;
                taken[slot] = true;
                if rec(h, adj, assign, taken, v + 1) {
                    return true;
                }
                taken[slot] = false;
                assign[v] = usize::MAX;
            }
        }
        false
    }
    rec(h, &adj, &mut assign, &mut taken, 0)
}

struct CopyPool {
    h_size: usize,
    masks: Vec<Vec<u64>>,
    verts: Vec<Vec<usize>>,
    /// Copy indices through each vertex, in lexicographic copy order.
    by_vertex: Vec<Vec<u32>>,
    truncated: bool,
}

impl CopyPool {
    fn build(g: &Graph, h: &Graph, limit: usize) -> Result<CopyPool> {
        check_pattern(h)?;
        if h.edge_count() == 0 {
            return Err(Error::Precondition("pattern must have an edge".into()));
        }
        let allowed = bits::from_indices(g.n().max(1), &(0..g.n()).collect::<Vec<_>>());
        let (sets, truncated) = enumerate_copy_sets(g, h, &allowed, limit);
        let verts: Vec<Vec<usize>> = sets.into_iter().collect();
        let masks: Vec<Vec<u64>> =
            verts.iter().map(|s| bits::from_indices(g.n().max(1), s)).collect();
        let mut by_vertex = vec![Vec::new(); g.n()];
        for (i, s) in verts.iter().enumerate() {
            for &v in s {
                by_vertex[v].push(i as u32);
            }
        }
        Ok(CopyPool { h_size: h.n(), masks, verts, by_vertex, truncated })
    }

    fn from_sets(g: &Graph, h: &Graph, sets: Vec<Vec<usize>>) -> CopyPool {
        let mut verts = sets;
        verts.sort();
        verts.dedup();
        let masks: Vec<Vec<u64>> =
            verts.iter().map(|s| bits::from_indices(g.n().max(1), s)).collect();
        let mut by_vertex = vec![Vec::new(); g.n()];
        for (i, s) in verts.iter().enumerate() {
            for &v in s {
                by_vertex[v].push(i as u32);
            }
        }
        CopyPool { h_size: h.n(), masks, verts, by_vertex, truncated: false }
    }
}

struct TilingSearch<'a> {
    pool: &'a CopyPool,
    budget: u64,
    nodes: u64,
    aborted: bool,
    chosen: Vec<u32>,
    best: Vec<u32>,
    upper_bound: usize,
}

impl<'a> TilingSearch<'a> {
    fn run(pool: &'a CopyPool, n: usize, budget: u64) -> (Vec<Vec<usize>>, bool, u64) {
        let mut s = TilingSearch {
            pool,
            budget,
            nodes: 0,
            aborted: false,
            chosen: Vec::new(),
            best: Vec::new(),
            upper_bound: n / pool.h_size,
        };
        let avail = bits::from_indices(n.max(1), &(0..n).collect::<Vec<_>>());
        s.search(avail, n);
        let copies = s.best.iter().map(|&i| pool.verts[i as usize].clone()).collect();
        let optimal = !s.aborted && !pool.truncated;
        (copies, optimal, s.nodes)
    }

    fn search(&mut self, avail: Vec<u64>, avail_count: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        if self.best.len() >= self.upper_bound {
            return; // a perfect packing cannot be beaten
        }
        // bound: even covering every remaining vertex cannot beat best
        if self.chosen.len() + avail_count / self.pool.h_size <= self.best.len() {
            return;
        }
        let Some(v) = bits::first(&avail) else { return };
        // assign v to each copy through it, lexicographic order
        for &ci in &self.pool.by_vertex[v] {
            let mask = &self.pool.masks[ci as usize];
            if bits::is_subset(mask, &avail) {
                let mut next = avail.clone();
                bits::subtract_into(&mut next, mask);
                self.chosen.push(ci);
                self.search(next, avail_count - self.pool.h_size);
                self.chosen.pop();
                if self.aborted || self.best.len() >= self.upper_bound {
                    return;
                }
            }
        }
        // discard branch, explored last
        let mut next = avail;
        bits::clear(&mut next, v);
        self.search(next, avail_count - 1);
    }
}

/// Maximum H-tiling by branch-and-bound; `optimal` is true iff the search
/// completed within `budget` (best-found returned otherwise).
pub fn max_tiling(g: &Graph, h: &Graph, budget: u64) -> Result<TilingResult> {
    let pool = CopyPool::build(g, h, ENUMERATION_LIMIT)?;
    Ok(run_pool_tiling(g, &pool, budget))
}

fn run_pool_tiling(g: &Graph, pool: &CopyPool, budget: u64) -> TilingResult {
    let (copies, optimal, nodes) = TilingSearch::run(pool, g.n(), budget);
    let mut covered = vec![false; g.n()];
    for c in &copies {
        for &v in c {
            covered[v] = true;
        }
    }
    let leftover: Vec<usize> = (0..g.n()).filter(|&v| !covered[v]).collect();
    TilingResult { copies, leftover, optimal, nodes_explored: nodes }
}

/// Maximum tiling restricted to an explicit list of admissible copy sets.
pub fn max_tiling_over(g: &Graph, h: &Graph, sets: Vec<Vec<usize>>, budget: u64) -> TilingResult {
    let pool = CopyPool::from_sets(g, h, sets);
    run_pool_tiling(g, &pool, budget)
}

/// Greedy tiling: repeatedly extracts a random copy among those minimizing
/// residual-degree damage (edges lost from the residual graph). Never claims
/// optimality; its count is a lower bound on the exact optimum.
pub fn greedy_tiling(g: &Graph, h: &Graph, seed: u64) -> Result<TilingResult> {
    check_pattern(h)?;
    if h.edge_count() == 0 {
        return Err(Error::Precondition("pattern must have an edge".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let mut avail = bits::from_indices(n.max(1), &(0..n).collect::<Vec<_>>());
    let mut copies = Vec::new();
    loop {
        let (sets, _) = enumerate_copy_sets(g, h, &avail, ENUMERATION_LIMIT);
        if sets.is_empty() {
            break;
        }
        let mut best_damage = usize::MAX;
        let mut minimizers: Vec<&Vec<usize>> = Vec::new();
        for s in &sets {
            let mask = bits::from_indices(n, s);
            let mut outside = avail.clone();
            bits::subtract_into(&mut outside, &mask);
            let damage: usize =
                bits::to_indices(&outside).iter().map(|&u| g.degree_in(u, &mask)).sum();
            match damage.cmp(&best_damage) {
                std::cmp::Ordering::Less => {
                    best_damage = damage;
                    minimizers = vec![s];
                }
                std::cmp::Ordering::Equal => minimizers.push(s),
                std::cmp::Ordering::Greater => {}
            }
        }
        let pick = minimizers[rng.gen_range(0..minimizers.len())].clone();
        for &v in &pick {
            bits::clear(&mut avail, v);
        }
        copies.push(pick);
    }
    let leftover = bits::to_indices(&avail);
    Ok(TilingResult { copies, leftover, optimal: false, nodes_explored: 0 })
}

/// Outcome of an H-factor query.
#[derive(Clone, Debug)]
pub enum FactorStatus {
    Yes(TilingResult),
    No,
    Unknown,
}

impl FactorStatus {
    pub fn is_yes(&self) -> bool {
        matches!(self, FactorStatus::Yes(_))
    }
}

/// Three-valued H-factor test; requires |H| dividing |G|.
pub fn has_factor(g: &Graph, h: &Graph, budget: u64) -> Result<FactorStatus> {
    check_pattern(h)?;
    if h.n() == 0 || g.n() % h.n() != 0 {
        return Err(Error::Precondition(format!(
            "|H| = {} does not divide |G| = {}",
            h.n(),
            g.n()
        )));
    }
    let result = max_tiling(g, h, budget)?;
    if result.leftover.is_empty() {
        Ok(FactorStatus::Yes(result))
    } else if result.optimal {
        Ok(FactorStatus::No)
    } else {
        Ok(FactorStatus::Unknown)
    }
}

/// K_k-tiling via the padding construction: add `ks + r` universal vertices
/// (r making the total divisible by k), find a K_k-factor there, and strip
/// every copy that touches padding. Requires the Ore-type hypothesis
/// `d(x)+d(y) >= 2(1-1/k)n - 2s` for all nonadjacent pairs; the leftover is
/// then at most `k(k-1)s + (k-1)^2`.
pub fn kk_tiling_padded(g: &Graph, k: usize, s: usize, budget: u64) -> Result<TilingResult> {
    if k < 2 {
        return Err(Error::Precondition("k must be at least 2".into()));
    }
    let n = g.n();
    let threshold = rat_int(2) * rat_usize(k - 1) / rat_usize(k) * rat_usize(n)
        - rat_int(2) * rat_usize(s);
    let report = crate::graph::ore_report_with_threshold(g, threshold);
    if !report.satisfied() {
        return Err(Error::Precondition(format!(
            "Ore hypothesis d(x)+d(y) >= 2(1-1/{k})n - 2{s} fails at pair {:?}",
            report.witness_pair
        )));
    }
    let r = (k - (n + k * s) % k) % k;
    let pad = k * s + r;
    let mut padded = Graph::empty(n + pad);
    for (u, v) in g.edges() {
        padded.add_edge(u, v);
    }
    for p in n..n + pad {
        for v in 0..n + pad {
            if v != p {
                padded.add_edge(p, v);
            }
        }
    }
    let inner = max_tiling(&padded, &Graph::complete(k), budget)?;
    if !inner.leftover.is_empty() {
        if inner.optimal {
            // Kierstead-Kostochka guarantees a factor of the padded graph
            return Err(Error::Lemma(format!(
                "padded graph on {} vertices has no K_{k}-factor despite the Ore hypothesis",
                n + pad
            )));
        }
        return Err(Error::Budget("padded K_k-factor search exhausted its budget".into()));
    }
    let copies: Vec<Vec<usize>> =
        inner.copies.into_iter().filter(|c| c.iter().all(|&v| v < n)).collect();
    let mut covered = vec![false; n];
    for c in &copies {
        for &v in c {
            covered[v] = true;
        }
    }
    let leftover: Vec<usize> = (0..n).filter(|&v| !covered[v]).collect();
    let bound = k * (k - 1) * s + (k - 1) * (k - 1);
    if leftover.len() > bound {
        return Err(Error::Lemma(format!(
            "padded tiling leftover {} exceeds k(k-1)s + (k-1)^2 = {bound}",
            leftover.len()
        )));
    }
    let optimal = leftover.is_empty();
    Ok(TilingResult { copies, leftover, optimal, nodes_explored: inner.nodes_explored })
}

/// Greedy embedding of H into a tuple of clusters, one color class per
/// cluster, the sigma-class into `small_class_position`. Restarts with fresh
/// random choices up to `retries`; `None` when all retries fail.
pub fn embed_in_clusters(
    g: &Graph,
    clusters: &[Vec<usize>],
    h: &Graph,
    small_class_position: usize,
    seed: u64,
) -> Result<Option<Vec<usize>>> {
    let classes = crate::chromatic::sigma_coloring(h)?;
    if clusters.len() != classes.len() {
        return Err(Error::Precondition(format!(
            "{} clusters for chi(H) = {} classes",
            clusters.len(),
            classes.len()
        )));
    }
    if clusters.iter().any(|c| c.len() < h.n()) {
        return Err(Error::Precondition("every cluster must have at least |H| vertices".into()));
    }
    if small_class_position >= clusters.len() {
        return Err(Error::Precondition("small class position out of range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(embed_with_classes(g, clusters, h, &classes, small_class_position, 64, &mut rng))
}

/// Embedding work-horse shared with the pipeline: classes are given, class 0
/// is the sigma-class and goes to `small_class_position`; other classes are
/// shuffled over the remaining clusters on each retry.
pub fn embed_with_classes(
    g: &Graph,
    clusters: &[Vec<usize>],
    h: &Graph,
    classes: &[Vec<usize>],
    small_class_position: usize,
    retries: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    embed_pinned(g, clusters, h, classes, &[(0, small_class_position)], retries, rng, &[])
}

/// General embedding with pinned class-to-cluster assignments and pre-placed
/// vertices. `pins` holds (class index, cluster position) pairs; unpinned
/// classes are shuffled over the remaining clusters on each retry. `prefill`
/// pins (h_vertex, g_vertex) pairs before the greedy walk starts.
#[allow(clippy::too_many_arguments)]
pub fn embed_pinned(
    g: &Graph,
    clusters: &[Vec<usize>],
    h: &Graph,
    classes: &[Vec<usize>],
    pins: &[(usize, usize)],
    retries: usize,
    rng: &mut ChaCha8Rng,
    prefill: &[(usize, usize)],
) -> Option<Vec<usize>> {
    let k = classes.len();
    let pinned_classes: Vec<usize> = pins.iter().map(|&(c, _)| c).collect();
    let pinned_clusters: Vec<usize> = pins.iter().map(|&(_, p)| p).collect();
    let free_classes: Vec<usize> = (0..k).filter(|c| !pinned_classes.contains(c)).collect();
    let free_clusters: Vec<usize> = (0..clusters.len())
        .filter(|p| !pinned_clusters.contains(p))
        .collect();
    if free_classes.len() != free_clusters.len() {
        return None;
    }
    for _ in 0..retries.max(1) {
        let mut perm = free_clusters.clone();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut class_to_cluster = vec![usize::MAX; k];
        for &(c, p) in pins {
            class_to_cluster[c] = p;
        }
        for (ci, &cl) in free_classes.iter().zip(perm.iter()) {
            class_to_cluster[*ci] = cl;
        }
        if let Some(copy) = try_embed(g, clusters, h, classes, &class_to_cluster, rng, prefill) {
            return Some(copy);
        }
    }
    None
}

fn try_embed(
    g: &Graph,
    clusters: &[Vec<usize>],
    h: &Graph,
    classes: &[Vec<usize>],
    class_to_cluster: &[usize],
    rng: &mut ChaCha8Rng,
    prefill: &[(usize, usize)],
) -> Option<Vec<usize>> {
    let n = h.n();
    let mut cluster_of_hv = vec![usize::MAX; n];
    for (ci, class) in classes.iter().enumerate() {
        for &v in class {
            cluster_of_hv[v] = class_to_cluster[ci];
        }
    }
    let mut image = vec![usize::MAX; n];
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for &(hv, gv) in prefill {
        image[hv] = gv;
        used.insert(gv);
    }
    // embed in descending H-degree order; each vertex draws a random
    // compatible candidate from its assigned cluster
    let mut order: Vec<usize> = (0..n).filter(|v| image[*v] == usize::MAX).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(h.degree(v)));
    for &hv in &order {
        let cluster = &clusters[cluster_of_hv[hv]];
        let mut cands: Vec<usize> = cluster
            .iter()
            .copied()
            .filter(|&gv| {
                !used.contains(&gv)
                    && (0..n).all(|hu| {
                        image[hu] == usize::MAX || !h.has_edge(hu, hv) || g.has_edge(image[hu], gv)
                    })
            })
            .collect();
        if cands.is_empty() {
            return None;
        }
        let pick = cands.swap_remove(rng.gen_range(0..cands.len()));
        image[hv] = pick;
        used.insert(pick);
    }
    let mut copy: Vec<usize> = image;
    copy.sort_unstable();
    Some(copy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    #[test]
    fn enumerate_triangles() {
        let (sets, trunc) = enumerate_copies(&Graph::complete(4), &Graph::complete(3), 100).unwrap();
        assert_eq!(sets.len(), 4);
        assert!(!trunc);
        let (sets, _) = enumerate_copies(&Graph::cycle(5), &Graph::complete(3), 100).unwrap();
        assert!(sets.is_empty());
        let octahedron = Graph::complete_multipartite(&[2, 2, 2]).unwrap();
        let (sets, _) = enumerate_copies(&octahedron, &Graph::complete(3), 100).unwrap();
        assert_eq!(sets.len(), 8);
    }

    #[test]
    fn enumerate_truncates() {
        let (sets, trunc) = enumerate_copies(&Graph::complete(10), &Graph::complete(3), 7).unwrap();
        assert_eq!(sets.len(), 7);
        assert!(trunc);
    }

    #[test]
    fn max_tiling_small() {
        let r = max_tiling(&Graph::complete(6), &Graph::complete(3), 1 << 20).unwrap();
        assert_eq!(r.copies.len(), 2);
        assert!(r.leftover.is_empty());
        assert!(r.optimal);

        let r = max_tiling(&Graph::cycle(5), &Graph::complete(2), 1 << 20).unwrap();
        assert_eq!(r.copies.len(), 2);
        assert_eq!(r.leftover.len(), 1);
        assert!(r.optimal);
    }

    #[test]
    fn max_tiling_octahedron_minus_matching() {
        // K_{2,2,2} minus a perfect matching (parts {0,1},{2,3},{4,5}): still
        // two disjoint triangles remain
        let mut g = Graph::complete_multipartite(&[2, 2, 2]).unwrap();
        g.remove_edge(0, 2);
        g.remove_edge(1, 4);
        g.remove_edge(3, 5);
        let r = max_tiling(&g, &Graph::complete(3), 1 << 20).unwrap();
        assert_eq!(r.copies.len(), 2);
        assert!(r.optimal);
        for c in &r.copies {
            assert!(verify_copy(&g, &Graph::complete(3), c));
        }
    }

    #[test]
    fn greedy_never_beats_exact() {
        let g = Graph::random(30, &rat(4, 5), 11).unwrap();
        let h = Graph::complete(3);
        let exact = max_tiling(&g, &h, 1 << 22).unwrap();
        assert!(exact.optimal);
        for seed in 0..5 {
            let greedy = greedy_tiling(&g, &h, seed).unwrap();
            assert!(greedy.copies.len() <= exact.copies.len());
            assert!(!greedy.optimal);
            for c in &greedy.copies {
                assert!(verify_copy(&g, &h, c));
            }
        }
    }

    #[test]
    fn greedy_on_empty_graph() {
        let r = greedy_tiling(&Graph::empty(5), &Graph::complete(2), 0).unwrap();
        assert!(r.copies.is_empty());
        assert_eq!(r.leftover.len(), 5);
    }

    #[test]
    fn factor_queries() {
        let k32 = Graph::complete_multipartite(&[2, 2, 2]).unwrap();
        assert!(has_factor(&k32, &Graph::complete(3), 1 << 20).unwrap().is_yes());
        assert!(matches!(
            has_factor(&Graph::cycle(6), &Graph::complete(3), 1 << 20).unwrap(),
            FactorStatus::No
        ));
        assert!(has_factor(&Graph::cycle(5), &Graph::complete(3), 1 << 20).is_err());
    }

    #[test]
    fn padded_tiling_examples() {
        // C_5, k=2, s=1: max matching 2, leftover 1 <= 2*1*1 + 1 = 3
        let r = kk_tiling_padded(&Graph::cycle(5), 2, 1, 1 << 20).unwrap();
        assert_eq!(r.leftover.len(), 1);
        // K_7, k=2, s=0: odd clique, leftover (k-1)^2 = 1
        let r = kk_tiling_padded(&Graph::complete(7), 2, 0, 1 << 20).unwrap();
        assert_eq!(r.leftover.len(), 1);
        // K_9, k=3, s=0: perfect
        let r = kk_tiling_padded(&Graph::complete(9), 3, 0, 1 << 20).unwrap();
        assert!(r.leftover.is_empty());
        // hypothesis violated: empty graph
        assert!(matches!(
            kk_tiling_padded(&Graph::empty(6), 2, 0, 1 << 20),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn embed_transversal_triangle() {
        let g = Graph::complete_multipartite(&[3, 3, 3]).unwrap();
        let clusters = Graph::multipartite_parts(&[3, 3, 3]);
        let copy = embed_in_clusters(&g, &clusters, &Graph::complete(3), 0, 5).unwrap().unwrap();
        assert!(verify_copy(&g, &Graph::complete(3), &copy));
        // one vertex per part
        for part in &clusters {
            assert_eq!(copy.iter().filter(|v| part.contains(v)).count(), 1);
        }
    }

    #[test]
    fn embed_reports_failure() {
        // two clusters with no cross edges: no K_2 transversal exists
        let g = Graph::empty(6);
        let clusters = vec![vec![0, 1, 2], vec![3, 4, 5]];
        let r = embed_in_clusters(&g, &clusters, &Graph::complete(2), 0, 1).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn verify_copy_rejects_junk() {
        let g = Graph::cycle(5);
        assert!(verify_copy(&g, &Graph::path(3), &[0, 1, 2]));
        assert!(!verify_copy(&g, &Graph::complete(3), &[0, 1, 2]));
        assert!(!verify_copy(&g, &Graph::complete(2), &[0, 0]));
    }
}

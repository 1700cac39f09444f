//! Small-graph infrastructure for the exhaustive lemma checks: enumeration
//! of all graphs up to isomorphism (n <= 8) and a catalog of graphs with
//! hand-verified chromatic data.
//!
//! The lemma-level properties verified exhaustively (clique-cover claims,
//! connection trichotomy) are isomorphism-invariant, so one representative
//! per class covers "all graphs".

use crate::graph::Graph;
use std::collections::HashSet;

/// Canonical edge encoding: minimum over vertex relabelings respecting the
/// refined invariant partition, as a bitmask over pairs (i<j) in colex order.
pub fn canonical_code(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n <= 11, "canonical code limited to C(11,2) = 55 bits");
    if n <= 1 {
        return 0;
    }
    // two rounds of degree refinement: (degree, sorted neighbor degrees)
    let deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut invariant: Vec<(usize, Vec<usize>)> = (0..n)
        .map(|v| {
            let mut nd: Vec<usize> = g.neighbors(v).iter().map(|&u| deg[u]).collect();
            nd.sort_unstable();
            (deg[v], nd)
        })
        .collect();
    // classes ordered by invariant; candidate labelings permute only within
    // classes, which is sound because the invariant is isomorphism-invariant
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| invariant[a].cmp(&invariant[b]));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        if let Some(last) = classes.last_mut() {
            if invariant[last[0]] == invariant[v] {
                last.push(v);
                continue;
            }
        }
        classes.push(vec![v]);
    }
    invariant.clear();

    let mut best = u64::MAX;
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    min_code_rec(g, &classes, 0, &mut perm, &mut best);
    best
}

fn encode(g: &Graph, perm: &[usize]) -> u64 {
    let mut code = 0u64;
    let mut bit = 0;
    for j in 1..perm.len() {
        for i in 0..j {
            if g.has_edge(perm[i], perm[j]) {
                code |= 1 << bit;
            }
            bit += 1;
        }
    }
    code
}

fn min_code_rec(g: &Graph, classes: &[Vec<usize>], ci: usize, perm: &mut Vec<usize>, best: &mut u64) {
    if ci == classes.len() {
        let code = encode(g, perm);
        if code < *best {
            *best = code;
        }
        return;
    }
    // all permutations of this class appended to the prefix
    let class = &classes[ci];
    permute_class(g, classes, ci, class, &mut vec![false; class.len()], perm, best);
}

#[allow(clippy::too_many_arguments)]
fn permute_class(
    g: &Graph,
    classes: &[Vec<usize>],
    ci: usize,
    class: &[usize],
    taken: &mut Vec<bool>,
    perm: &mut Vec<usize>,
    best: &mut u64,
) {
    if taken.iter().all(|&t| t) {
        min_code_rec(g, classes, ci + 1, perm, best);
        return;
    }
    for idx in 0..class.len() {
        if taken[idx] {
            continue;
        }
        taken[idx] = true;
        perm.push(class[idx]);
        permute_class(g, classes, ci, class, taken, perm, best);
        perm.pop();
        taken[idx] = false;
    }
}

/// All graphs on exactly `n` vertices up to isomorphism, by canonical
/// augmentation (extend each (n-1)-vertex graph by one vertex with every
/// possible neighborhood, dedup by canonical code).
pub fn all_graphs_up_to_iso(n: usize) -> Vec<Graph> {
    assert!(n <= 8, "enumeration intended for n <= 8");
    if n == 0 {
        return vec![Graph::empty(0)];
    }
    let mut current = vec![Graph::empty(1)];
    for m in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &current {
            for nbhd in 0..(1u32 << (m - 1)) {
                let mut ext = Graph::empty(m);
                for (u, v) in g.edges() {
                    ext.add_edge(u, v);
                }
                for v in 0..m - 1 {
                    if nbhd >> v & 1 == 1 {
                        ext.add_edge(v, m - 1);
                    }
                }
                let code = canonical_code(&ext);
                if seen.insert(code) {
                    next.push(ext);
                }
            }
        }
        current = next;
    }
    current
}

/// All graphs with at most `n` vertices up to isomorphism (n >= 1).
pub fn all_graphs_up_to_order(n: usize) -> Vec<Graph> {
    (1..=n).flat_map(all_graphs_up_to_iso).collect()
}

/// A named graph with hand-verified chromatic number and smallest optimal
/// color class.
pub struct CatalogEntry {
    pub name: &'static str,
    pub graph: Graph,
    pub chi: usize,
    /// Minimum class size over all chi-colorings, verified by hand:
    /// complete multipartite graphs and connected bipartite graphs have a
    /// unique optimal partition; odd cycles admit a singleton class; wheels
    /// isolate the hub; the paw pins the triangle.
    pub sigma: usize,
}

/// Catalog of graphs (|H| <= 10) with hand-verified (chi, sigma).
pub fn verified_catalog() -> Vec<CatalogEntry> {
    let km = |sizes: &[usize]| Graph::complete_multipartite(sizes).unwrap();
    let wheel5 = {
        let mut g = Graph::cycle(5);
        let mut w = Graph::empty(6);
        for (u, v) in g.edges() {
            w.add_edge(u, v);
        }
        for v in 0..5 {
            w.add_edge(v, 5);
        }
        g = w;
        g
    };
    let paw = {
        let mut g = Graph::complete(3);
        let mut p = Graph::empty(4);
        for (u, v) in g.edges() {
            p.add_edge(u, v);
        }
        p.add_edge(0, 3);
        g = p;
        g
    };
    vec![
        CatalogEntry { name: "K_2", graph: Graph::complete(2), chi: 2, sigma: 1 },
        CatalogEntry { name: "K_3", graph: Graph::complete(3), chi: 3, sigma: 1 },
        CatalogEntry { name: "K_4", graph: Graph::complete(4), chi: 4, sigma: 1 },
        CatalogEntry { name: "K_5", graph: Graph::complete(5), chi: 5, sigma: 1 },
        CatalogEntry { name: "K_6", graph: Graph::complete(6), chi: 6, sigma: 1 },
        CatalogEntry { name: "P_3=K_{1,2}", graph: Graph::path(3), chi: 2, sigma: 1 },
        CatalogEntry { name: "P_4", graph: Graph::path(4), chi: 2, sigma: 2 },
        CatalogEntry { name: "P_5", graph: Graph::path(5), chi: 2, sigma: 2 },
        CatalogEntry { name: "P_6", graph: Graph::path(6), chi: 2, sigma: 3 },
        CatalogEntry { name: "C_4", graph: Graph::cycle(4), chi: 2, sigma: 2 },
        CatalogEntry { name: "C_6", graph: Graph::cycle(6), chi: 2, sigma: 3 },
        CatalogEntry { name: "C_8", graph: Graph::cycle(8), chi: 2, sigma: 4 },
        CatalogEntry { name: "C_5", graph: Graph::cycle(5), chi: 3, sigma: 1 },
        CatalogEntry { name: "C_7", graph: Graph::cycle(7), chi: 3, sigma: 1 },
        CatalogEntry { name: "C_9", graph: Graph::cycle(9), chi: 3, sigma: 1 },
        CatalogEntry { name: "K_{1,3}", graph: Graph::star(3), chi: 2, sigma: 1 },
        CatalogEntry { name: "K_{1,4}", graph: Graph::star(4), chi: 2, sigma: 1 },
        CatalogEntry { name: "K_{2,3}", graph: km(&[2, 3]), chi: 2, sigma: 2 },
        CatalogEntry { name: "K_{2,4}", graph: km(&[2, 4]), chi: 2, sigma: 2 },
        CatalogEntry { name: "K_{3,3}", graph: km(&[3, 3]), chi: 2, sigma: 3 },
        CatalogEntry { name: "K_{1,1,2}", graph: km(&[1, 1, 2]), chi: 3, sigma: 1 },
        CatalogEntry { name: "K_{1,2,2}", graph: km(&[1, 2, 2]), chi: 3, sigma: 1 },
        CatalogEntry { name: "K_{2,2,2}", graph: km(&[2, 2, 2]), chi: 3, sigma: 2 },
        CatalogEntry { name: "K_{1,1,1,2}", graph: km(&[1, 1, 1, 2]), chi: 4, sigma: 1 },
        CatalogEntry { name: "W_5", graph: wheel5, chi: 4, sigma: 1 },
        CatalogEntry { name: "paw", graph: paw, chi: 3, sigma: 1 },
    ]
}

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tilelab_core::cover::{maximal_clique_cover, CoverMode};
use tilelab_core::digraph::Digraph;
use tilelab_core::graph::Graph;
use tilelab_core::ratio::rat;
use tilelab_core::tiling::max_tiling;
use tilelab_core::transfer::sink_set_greedy;

fn bench_max_tiling(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_tiling_k3");
    for n in [12usize, 18, 24] {
        let g = Graph::random(n, &rat(7, 10), 42).unwrap();
        let h = Graph::complete(3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| max_tiling(g, &h, 1 << 22).unwrap())
        });
    }
    group.finish();
}

fn bench_exact_cover(c: &mut Criterion) {
    let g = Graph::random(10, &rat(1, 2), 7).unwrap();
    c.bench_function("exact_cover_n10_k3", |b| {
        b.iter(|| maximal_clique_cover(&g, 3, CoverMode::Exact, 1 << 22).unwrap())
    });
}

fn bench_sink_set(c: &mut Criterion) {
    let d = Digraph::random(30, &rat(1, 4), 3).unwrap();
    c.bench_function("sink_set_n30", |b| b.iter(|| sink_set_greedy(&d).unwrap()));
}

criterion_group!(benches, bench_max_tiling, bench_exact_cover, bench_sink_set);
criterion_main!(benches);

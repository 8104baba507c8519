use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use patentflow::testkit::random_graph;
use patentflow::{
    pagerank, CitationGraph, NodeIndex, PageRankParams, PowerIteration, DAMPING_SWEEP,
};

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("graph_build");
    for n in [10_000usize, 100_000] {
        let g = random_graph(n, 10 * n, 0.05, 1);
        let edges: Vec<(NodeIndex, NodeIndex)> = g.edges().collect();
        group.throughput(Throughput::Elements(edges.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &edges, |b, edges| {
            b.iter(|| CitationGraph::build(black_box(edges), n).unwrap())
        });
    }
    group.finish();
}

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("power_step");
    for n in [10_000usize, 100_000, 1_000_000] {
        let g = random_graph(n, 10 * n, 0.05, 2);
        group.throughput(Throughput::Elements(g.edge_count() as u64));
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            let mut it = PowerIteration::new(&g, PageRankParams::default()).unwrap();
            b.iter(|| black_box(it.step()))
        });
    }
    group.finish();
}

fn converge(c: &mut Criterion) {
    let mut group = c.benchmark_group("pagerank_to_convergence");
    group.sample_size(20);
    let g = random_graph(100_000, 1_000_000, 0.05, 3);
    for d in DAMPING_SWEEP {
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| pagerank(&g, &PageRankParams::with_damping(d)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, build, step, converge);
criterion_main!(benches);

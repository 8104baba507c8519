use criterion::{criterion_group, criterion_main, Criterion};
use patentflow::testkit::{generate_synthetic_dataset, SyntheticSpec};
use patentflow::{
    assignee_exclusion_set, class_inflow_series, excluded_flow_pipeline, pagerank, FlowMetric,
    PageRankParams,
};

fn trend(c: &mut Criterion) {
    let spec = SyntheticSpec::crossover_demo(50_000, 2004);
    let ds = generate_synthetic_dataset(&spec, 1).unwrap();
    let params = PageRankParams::default();
    let ranks = pagerank(ds.graph(), &params).unwrap();

    let mut group = c.benchmark_group("trend_50k");
    group.sample_size(20);
    group.bench_function("generate", |b| {
        b.iter(|| generate_synthetic_dataset(&spec, 1).unwrap())
    });
    for metric in FlowMetric::ALL {
        group.bench_function(format!("inflow_{metric}"), |b| {
            b.iter(|| class_inflow_series(&ds, &ranks, "347", metric).unwrap())
        });
    }
    group.bench_function("exclusion_set", |b| {
        b.iter(|| assignee_exclusion_set(&ds, "Canon"))
    });
    group.bench_function("excluded_flow_pipeline", |b| {
        b.iter(|| {
            excluded_flow_pipeline(&ds, "Canon", "347", FlowMetric::PagerankSum, &params).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, trend);
criterion_main!(benches);

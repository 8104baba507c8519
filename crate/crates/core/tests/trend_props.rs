use std::collections::{BTreeMap, BTreeSet};

use patentflow::ingest::normalize_assignee;
use patentflow::testkit::{generate_synthetic_dataset, SyntheticSpec};
use patentflow::{
    assignee_exclusion_set, class_inflow_series, class_ratio, crossover_year,
    excluded_flow_pipeline, pagerank, patent_inflow_breakdown, ClassFlowSeries, FlowMetric,
    NodeIndex, PageRankParams, PatentDataset,
};
use proptest::prelude::*;

fn demo(n: usize, seed: u64) -> PatentDataset {
    generate_synthetic_dataset(&SyntheticSpec::crossover_demo(n, 2004), seed).unwrap()
}

#[test]
fn breakdowns_sum_to_class_series() {
    for seed in 0..20 {
        let ds = demo(600 + 50 * seed as usize, seed);
        let ranks = pagerank(ds.graph(), &PageRankParams::default()).unwrap();
        for target in ["347", "435"] {
            let targets: Vec<NodeIndex> = ds
                .graph()
                .nodes()
                .filter(|&u| ds.meta(u).primary_class.as_deref() == Some(target))
                .collect();
            // Union of citers over the class, each citing patent once.
            let mut citers = BTreeSet::new();
            let mut edge_total = 0u64;
            for &t in &targets {
                let b = patent_inflow_breakdown(&ds, &ranks, t).unwrap();
                edge_total += b.entries.values().map(|&(c, _)| c).sum::<u64>();
                for ((c, y), &(count, sum)) in &b.entries {
                    let (c, y) = (c.as_str(), *y);
                    let mut check = (0u64, 0.0f64);
                    for &u in &b.citers {
                        if ds.class_year(u) == Some((c, y)) {
                            check.0 += 1;
                            check.1 += ranks.score(u);
                        }
                    }
                    assert_eq!(check.0, count);
                    assert!((check.1 - sum).abs() < 1e-15);
                }
                citers.extend(b.citers);
            }
            let mut counts: BTreeMap<(String, i32), f64> = BTreeMap::new();
            let mut sums: BTreeMap<(String, i32), f64> = BTreeMap::new();
            for &u in &citers {
                let (c, y) = ds.class_year(u).unwrap();
                if c == target {
                    continue;
                }
                *counts.entry((c.to_owned(), y)).or_default() += 1.0;
                *sums.entry((c.to_owned(), y)).or_default() += ranks.score(u);
            }
            let by_count =
                class_inflow_series(&ds, &ranks, target, FlowMetric::CitationCount).unwrap();
            let by_rank =
                class_inflow_series(&ds, &ranks, target, FlowMetric::PagerankSum).unwrap();
            assert_eq!(by_count.entries, counts, "seed {seed} target {target}");
            assert_eq!(
                by_rank.entries.keys().collect::<Vec<_>>(),
                sums.keys().collect::<Vec<_>>()
            );
            for (k, v) in &sums {
                assert!((by_rank.entries[k] - v).abs() <= 1e-12, "seed {seed} {k:?}");
            }
            assert!(edge_total as usize >= citers.len());
        }
    }
}

#[test]
fn series_is_external_and_non_negative() {
    let ds = demo(2000, 4);
    let ranks = pagerank(ds.graph(), &PageRankParams::default()).unwrap();
    for metric in FlowMetric::ALL {
        let s = class_inflow_series(&ds, &ranks, "347", metric).unwrap();
        assert!(!s.is_empty());
        assert!(!s.source_classes().contains("347"));
        assert!(s.entries.values().all(|&v| v > 0.0));
        if metric == FlowMetric::CitationCount {
            assert!(s.entries.values().all(|v| v.fract() == 0.0));
        }
    }
}

#[test]
fn exclusion_matches_edge_scan() {
    for seed in 0..5 {
        let ds = demo(1500, seed);
        for assignee in ["Canon", "  epson", "RICOH ", "Nobody"] {
            let set = assignee_exclusion_set(&ds, assignee);
            let wanted = normalize_assignee(assignee);
            let owned: BTreeSet<NodeIndex> = ds
                .graph()
                .nodes()
                .filter(|&u| normalize_assignee(&ds.meta(u).assignee) == wanted)
                .collect();
            let mut expected = owned.clone();
            for (u, v) in ds.graph().edges() {
                if owned.contains(&v) {
                    expected.insert(u);
                }
                if owned.contains(&u) {
                    expected.insert(v);
                }
            }
            assert_eq!(set.excluded(), expected, "seed {seed} {assignee:?}");
            assert_eq!(set.owned, owned);
        }
    }
}

#[test]
fn null_exclusion_leaves_series_unchanged() {
    let ds = demo(1500, 2);
    let params = PageRankParams::default();
    let ranks = pagerank(ds.graph(), &params).unwrap();
    for metric in FlowMetric::ALL {
        let full = class_inflow_series(&ds, &ranks, "347", metric).unwrap();
        let out = excluded_flow_pipeline(&ds, "Nobody Inc", "347", metric, &params).unwrap();
        assert_eq!(out.series, full);
        assert_eq!(out.ranks.scores, ranks.scores);
    }
}

#[test]
fn planted_regimes_recovered() {
    let ds = demo(5000, 1);
    let ranks = pagerank(ds.graph(), &PageRankParams::default()).unwrap();
    for metric in FlowMetric::ALL {
        let s = class_inflow_series(&ds, &ranks, "347", metric).unwrap();
        assert_eq!(crossover_year(&s, "400", "358"), Some(2004), "{metric}");
    }
    let counts = class_inflow_series(&ds, &ranks, "347", FlowMetric::CitationCount).unwrap();
    let ratio = class_ratio(&counts, "400", "358", 1990..=2012);
    for (&year, &r) in &ratio {
        if year < 2004 {
            assert!(r > 1.0, "{year}: {r}");
        } else {
            assert!(r < 1.0 / 3.0, "{year}: {r}");
        }
    }
}

#[test]
fn metadata_marginals_within_three_sigma() {
    let spec = SyntheticSpec::crossover_demo(20_000, 2004);
    let ds = generate_synthetic_dataset(&spec, 17).unwrap();
    let n = ds.node_count() as f64;
    let check = |label: &str, observed: usize, p: f64| {
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!(
            (observed as f64 - n * p).abs() <= 3.0 * sigma,
            "{label}: observed {observed}, expected {}",
            n * p
        );
    };
    for c in &spec.classes {
        let count = ds
            .metas()
            .iter()
            .filter(|m| m.primary_class.as_deref() == Some(c.code.as_str()))
            .count();
        check(&c.code, count, c.weight);
    }
    for a in &spec.assignees {
        let count = ds.metas().iter().filter(|m| m.assignee == a.name).count();
        check(&a.name, count, a.weight);
    }
    let years = (spec.year_range.1 - spec.year_range.0 + 1) as f64;
    for y in spec.year_range.0..=spec.year_range.1 {
        let count = ds
            .metas()
            .iter()
            .filter(|m| m.grant_year == Some(y))
            .count();
        check(&y.to_string(), count, 1.0 / years);
    }
}

fn series_from(flows_a: &[f64], flows_b: &[f64]) -> ClassFlowSeries {
    let mut entries = BTreeMap::new();
    for (k, (&a, &b)) in flows_a.iter().zip(flows_b).enumerate() {
        let year = 1990 + k as i32;
        if a > 0.0 {
            entries.insert(("a".to_owned(), year), a);
        }
        if b > 0.0 {
            entries.insert(("b".to_owned(), year), b);
        }
    }
    ClassFlowSeries {
        target_class: "t".into(),
        metric: FlowMetric::PagerankSum,
        entries,
        target_present: true,
    }
}

/// Crossover by direct definition: scan candidate years in order.
fn crossover_brute_force(s: &ClassFlowSeries) -> Option<i32> {
    let years: Vec<i32> = s.years().into_iter().collect();
    years.iter().copied().find(|&y| {
        let suffix_b = years
            .iter()
            .filter(|&&x| x >= y)
            .all(|&x| s.flow("b", x) > s.flow("a", x));
        let prior_a = years
            .iter()
            .filter(|&&x| x < y)
            .any(|&x| s.flow("a", x) >= s.flow("b", x));
        suffix_b && prior_a
    })
}

proptest! {
    #[test]
    fn crossover_matches_definition_and_ignores_scale(
        flows in prop::collection::vec((0u32..20, 0u32..20), 0..25),
        scale in 1e-6f64..1e6,
    ) {
        let a: Vec<f64> = flows.iter().map(|&(x, _)| x as f64).collect();
        let b: Vec<f64> = flows.iter().map(|&(_, y)| y as f64).collect();
        let s = series_from(&a, &b);
        let found = crossover_year(&s, "a", "b");
        prop_assert_eq!(found, crossover_brute_force(&s));

        let a2: Vec<f64> = a.iter().map(|v| v * scale).collect();
        let b2: Vec<f64> = b.iter().map(|v| v * scale).collect();
        prop_assert_eq!(crossover_year(&series_from(&a2, &b2), "a", "b"), found);
    }
}

use std::collections::BTreeSet;

use patentflow::testkit::random_graph;
use patentflow::{CitationGraph, NodeIndex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn raw_edges(n: usize, m: usize, seed: u64) -> Vec<(NodeIndex, NodeIndex)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| {
            (
                NodeIndex::from(rng.random_range(0..n)),
                NodeIndex::from(rng.random_range(0..n)),
            )
        })
        .collect()
}

#[test]
fn induced_subgraph_matches_edge_filter() {
    for seed in 0..20 {
        let n = 50;
        let edges = raw_edges(n, 200, seed);
        let (g, _) = CitationGraph::build(&edges, n).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let keep: BTreeSet<NodeIndex> = (0..n)
            .map(NodeIndex::from)
            .filter(|_| rng.random_bool(0.5))
            .collect();

        // Brute force: filter the raw list, drop loops and repeats, renumber.
        let kept: Vec<NodeIndex> = keep.iter().copied().collect();
        let renumber = |v: NodeIndex| NodeIndex::from(kept.binary_search(&v).unwrap());
        let expected: BTreeSet<(NodeIndex, NodeIndex)> = edges
            .iter()
            .filter(|(u, v)| u != v && keep.contains(u) && keep.contains(v))
            .map(|&(u, v)| (renumber(u), renumber(v)))
            .collect();

        let (sub, remap) = g.induced_subgraph(keep.iter().copied());
        let actual: BTreeSet<_> = sub.edges().collect();
        assert_eq!(actual, expected, "seed {seed}");
        assert_eq!(sub.node_count(), keep.len());
        for &old in &keep {
            assert_eq!(remap.to_old(remap.to_new(old).unwrap()), old);
        }
    }
}

proptest! {
    #[test]
    fn build_invariants(n in 1usize..60, m in 0usize..300, seed in any::<u64>()) {
        let edges = raw_edges(n, m, seed);
        let (g, report) = CitationGraph::build(&edges, n).unwrap();

        let distinct: BTreeSet<_> = edges.iter().filter(|(u, v)| u != v).collect();
        prop_assert_eq!(g.edge_count(), distinct.len());
        prop_assert_eq!(report.self_loops, edges.iter().filter(|(u, v)| u == v).count());
        prop_assert_eq!(
            report.input_edges,
            report.self_loops + report.duplicates + report.stored_edges
        );

        let out_sum: usize = g.nodes().map(|u| g.out_degree(u)).sum();
        let in_sum: usize = g.nodes().map(|u| g.in_degree(u)).sum();
        prop_assert_eq!(out_sum, g.edge_count());
        prop_assert_eq!(in_sum, g.edge_count());

        // Transpose round-trip: rebuilding from the flattened out-edges
        // reproduces the same in-edge structure.
        let flat: Vec<_> = g.edges().collect();
        let (rebuilt, _) = CitationGraph::build(&flat, n).unwrap();
        for u in g.nodes() {
            prop_assert_eq!(rebuilt.in_neighbors(u), g.in_neighbors(u));
        }
        prop_assert_eq!(&rebuilt, &g);

        let dangling: Vec<_> = g.nodes().filter(|&u| g.out_degree(u) == 0).collect();
        prop_assert_eq!(g.dangling_nodes(), dangling.as_slice());
    }

    #[test]
    fn keep_everything_is_identity(n in 1usize..80, seed in any::<u64>()) {
        let g = random_graph(n, 3 * n, 0.2, seed);
        let (sub, remap) = g.induced_subgraph(g.nodes());
        prop_assert!(remap.is_identity());
        prop_assert_eq!(sub, g);
    }
}

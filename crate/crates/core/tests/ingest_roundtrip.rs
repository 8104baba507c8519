use std::collections::BTreeSet;
use std::fmt::Write as _;

use patentflow::testkit::{generate_synthetic_dataset, ClassShare, EdgeModel, SyntheticSpec};
use patentflow::{assemble_dataset, parse_citations, parse_metadata, PatentDataset};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reingest(ds: &PatentDataset) -> PatentDataset {
    let mut c = Vec::new();
    let mut p = Vec::new();
    ds.write_citations(&mut c).unwrap();
    ds.write_metadata(&mut p).unwrap();
    let (edges, _) = parse_citations(c.as_slice()).unwrap();
    let (metas, _) = parse_metadata(p.as_slice()).unwrap();
    assemble_dataset(&edges, metas)
}

fn same_content(a: &PatentDataset, b: &PatentDataset) {
    assert_eq!(a.graph(), b.graph());
    assert_eq!(a.metas(), b.metas());
    for u in a.graph().nodes() {
        assert_eq!(b.node(a.id(u)), Some(u));
        assert_eq!(a.is_placeholder(u), b.is_placeholder(u));
    }
}

/// Builds a messy fixture: comments, blanks, malformed lines, metadata with
/// missing years, and citation endpoints without metadata. Self-loops only
/// when `loops` is set.
fn fixture(lines: usize, seed: u64, loops: bool) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut citations = String::from("# citing\tcited\n");
    let mut patents = String::new();
    for i in 0..lines / 2 {
        let year = if rng.random_bool(0.1) {
            String::new()
        } else {
            rng.random_range(1976..=2012).to_string()
        };
        let _ = writeln!(
            patents,
            "P{i}\t{}\t{year}\tAcme{}",
            rng.random_range(300..310),
            i % 7
        );
    }
    for _ in 0..lines {
        match rng.random_range(0..20) {
            0 => citations.push('\n'),
            1 => citations.push_str("# note\n"),
            2 => citations.push_str("broken-line\n"),
            _ => {
                let a = rng.random_range(0..lines);
                let mut b = rng.random_range(0..lines);
                if !loops && a == b {
                    b = (b + 1) % lines;
                }
                let _ = writeln!(citations, "P{a}\tP{b}");
            }
        }
    }
    (citations, patents)
}

#[test]
fn synthetic_dataset_round_trips() {
    let spec = SyntheticSpec {
        node_count: 1200,
        classes: vec![
            ClassShare {
                code: "347".into(),
                weight: 0.5,
            },
            ClassShare {
                code: "358".into(),
                weight: 0.5,
            },
        ],
        year_range: (1980, 2000),
        assignees: vec![],
        edge_model: EdgeModel::default(),
        planted_crossover: None,
    };
    let ds = generate_synthetic_dataset(&spec, 9).unwrap();
    same_content(&ds, &reingest(&ds));
}

#[test]
fn fixture_counts_match_line_tally() {
    let (citations, patents) = fixture(10_000, 3, true);

    // Independent recount straight from the text.
    let mut ids = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    let (mut malformed, mut loops) = (0, 0);
    for line in citations.lines() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 2 {
            malformed += 1;
            continue;
        }
        ids.insert(f[0].to_owned());
        ids.insert(f[1].to_owned());
        if f[0] == f[1] {
            loops += 1;
        } else {
            pairs.insert((f[0].to_owned(), f[1].to_owned()));
        }
    }
    let meta_ids: BTreeSet<String> = patents
        .lines()
        .map(|l| l.split('\t').next().unwrap().to_owned())
        .collect();
    let placeholders = ids.difference(&meta_ids).count();
    ids.extend(meta_ids);

    let ds = PatentDataset::from_readers(citations.as_bytes(), patents.as_bytes()).unwrap();
    let report = ds.report();
    assert_eq!(ds.node_count(), ids.len());
    assert_eq!(ds.graph().edge_count(), pairs.len());
    assert_eq!(report.placeholders, placeholders);
    assert_eq!(report.graph.self_loops, loops);
    assert_eq!(report.citations.unwrap().malformed, malformed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn messy_input_round_trips(lines in 10usize..400, seed in any::<u64>()) {
        // A metadata-less id seen only in self-loops becomes an edgeless
        // placeholder, which neither file format can carry back.
        let (citations, patents) = fixture(lines, seed, false);
        let ds = PatentDataset::from_readers(citations.as_bytes(), patents.as_bytes()).unwrap();
        same_content(&ds, &reingest(&ds));
        let report = ds.report();
        prop_assert_eq!(report.nodes, ds.node_count());
        prop_assert_eq!(report.metadata.unwrap().records + report.placeholders, ds.node_count());
    }
}

//! Class-selective temporal analysis of citation flow.
//!
//! The central quantity is the *inflow* into a target class: for every
//! external class and grant year, the summed PageRank (or the count) of the
//! patents of that class and year which cite at least one target-class
//! patent. Each citing patent counts once per series, however many
//! target-class patents it cites.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::NodeIndex;
use crate::ingest::{normalize_assignee, PatentDataset};
use crate::pagerank::{pagerank, PageRankParams, PageRankResult};
use crate::report::{csv_field, fmt_score};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowMetric {
    PagerankSum,
    CitationCount,
}

impl FlowMetric {
    pub const ALL: [FlowMetric; 2] = [FlowMetric::PagerankSum, FlowMetric::CitationCount];
}

impl FromStr for FlowMetric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pagerank-sum" => Ok(FlowMetric::PagerankSum),
            "citation-count" => Ok(FlowMetric::CitationCount),
            other => Err(format!(
                "unknown metric {other:?} (expected pagerank-sum or citation-count)"
            )),
        }
    }
}

impl fmt::Display for FlowMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlowMetric::PagerankSum => "pagerank-sum",
            FlowMetric::CitationCount => "citation-count",
        })
    }
}

/// Per (source class, year) inflow toward one target class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFlowSeries {
    pub target_class: String,
    pub metric: FlowMetric,
    pub entries: BTreeMap<(String, i32), f64>,
    /// False when no patent in the dataset carries the target class.
    pub target_present: bool,
}

impl ClassFlowSeries {
    /// Flow of `class` in `year`; zero when there is no entry.
    pub fn flow(&self, class: &str, year: i32) -> f64 {
        self.entries
            .get(&(class.to_owned(), year))
            .copied()
            .unwrap_or(0.0)
    }

    /// Per-year flow of one source class.
    pub fn class_series(&self, class: &str) -> BTreeMap<i32, f64> {
        self.entries
            .iter()
            .filter(|((c, _), _)| c == class)
            .map(|((_, y), &v)| (*y, v))
            .collect()
    }

    pub fn source_classes(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(c, _)| c.as_str()).collect()
    }

    pub fn years(&self) -> BTreeSet<i32> {
        self.entries.keys().map(|&(_, y)| y).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn format_value(&self, v: f64) -> String {
        match self.metric {
            FlowMetric::CitationCount => format!("{}", v as u64),
            FlowMetric::PagerankSum => fmt_score(v),
        }
    }

    pub const CSV_HEADER: &'static str = "target_class,source_class,year,metric,value";

    /// Writes the rows of this series, without a header line.
    pub fn write_csv_rows<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for ((class, year), &v) in &self.entries {
            writeln!(
                w,
                "{},{},{},{},{}",
                csv_field(&self.target_class),
                csv_field(class),
                year,
                self.metric,
                self.format_value(v)
            )?;
        }
        Ok(())
    }
}

/// Writes one CSV holding the rows of every series in order.
pub fn write_flow_csv<W: Write>(mut w: W, series: &[ClassFlowSeries]) -> io::Result<()> {
    writeln!(w, "{}", ClassFlowSeries::CSV_HEADER)?;
    for s in series {
        s.write_csv_rows(&mut w)?;
    }
    Ok(())
}

fn check_scores(dataset: &PatentDataset, scores: &PageRankResult) -> Result<()> {
    if scores.scores.len() != dataset.node_count() {
        return Err(Error::LengthMismatch {
            left: scores.scores.len(),
            right: dataset.node_count(),
        });
    }
    Ok(())
}

/// Inflow into `target_class` from every external class, by citing year.
///
/// Patents with unknown class or year never contribute.
pub fn class_inflow_series(
    dataset: &PatentDataset,
    scores: &PageRankResult,
    target_class: &str,
    metric: FlowMetric,
) -> Result<ClassFlowSeries> {
    check_scores(dataset, scores)?;
    let graph = dataset.graph();
    let is_target = |v: NodeIndex| dataset.meta(v).primary_class.as_deref() == Some(target_class);

    let mut entries: BTreeMap<(String, i32), f64> = BTreeMap::new();
    for u in graph.nodes() {
        let Some((class, year)) = dataset.class_year(u) else {
            continue;
        };
        if class == target_class || !graph.out_neighbors(u).iter().any(|&v| is_target(v)) {
            continue;
        }
        let contribution = match metric {
            FlowMetric::PagerankSum => scores.score(u),
            FlowMetric::CitationCount => 1.0,
        };
        *entries.entry((class.to_owned(), year)).or_insert(0.0) += contribution;
    }

    Ok(ClassFlowSeries {
        target_class: target_class.to_owned(),
        metric,
        entries,
        target_present: graph.nodes().any(is_target),
    })
}

/// In-link aggregate of a single patent, keyed by citing class and year.
#[derive(Debug, Clone, PartialEq)]
pub struct PatentBreakdown {
    pub patent: NodeIndex,
    /// (count, PageRank sum) per (class, year) of the citing patents.
    pub entries: BTreeMap<(String, i32), (u64, f64)>,
    /// Citing patents that contributed, ascending.
    pub citers: Vec<NodeIndex>,
    /// In-links whose citing patent lacks a class or year.
    pub unclassified_citers: usize,
}

#[derive(Serialize)]
struct BreakdownEntryJson<'a> {
    source_class: &'a str,
    year: i32,
    count: u64,
    pagerank_sum: f64,
}

#[derive(Serialize)]
struct BreakdownJson<'a> {
    patent_id: &'a str,
    class: Option<&'a str>,
    year: Option<i32>,
    ncit: usize,
    score: f64,
    unclassified_citers: usize,
    entries: Vec<BreakdownEntryJson<'a>>,
}

impl PatentBreakdown {
    pub fn to_json(&self, dataset: &PatentDataset, scores: &PageRankResult) -> serde_json::Value {
        let meta = dataset.meta(self.patent);
        let doc = BreakdownJson {
            patent_id: &meta.patent_id,
            class: meta.primary_class.as_deref(),
            year: meta.grant_year,
            ncit: dataset.graph().in_degree(self.patent),
            score: scores.score(self.patent),
            unclassified_citers: self.unclassified_citers,
            entries: self
                .entries
                .iter()
                .map(
                    |((class, year), &(count, pagerank_sum))| BreakdownEntryJson {
                        source_class: class,
                        year: *year,
                        count,
                        pagerank_sum,
                    },
                )
                .collect(),
        };
        serde_json::to_value(doc).expect("breakdown serializes")
    }
}

pub fn patent_inflow_breakdown(
    dataset: &PatentDataset,
    scores: &PageRankResult,
    patent: NodeIndex,
) -> Result<PatentBreakdown> {
    check_scores(dataset, scores)?;
    let mut breakdown = PatentBreakdown {
        patent,
        entries: BTreeMap::new(),
        citers: Vec::new(),
        unclassified_citers: 0,
    };
    for &u in dataset.graph().in_neighbors(patent) {
        let Some((class, year)) = dataset.class_year(u) else {
            breakdown.unclassified_citers += 1;
            continue;
        };
        let slot = breakdown
            .entries
            .entry((class.to_owned(), year))
            .or_insert((0, 0.0));
        slot.0 += 1;
        slot.1 += scores.score(u);
        breakdown.citers.push(u);
    }
    Ok(breakdown)
}

/// `flow(a, y) / flow(b, y)` for each year in the window; years where `b`
/// has no flow are absent.
pub fn class_ratio(
    series: &ClassFlowSeries,
    class_a: &str,
    class_b: &str,
    years: RangeInclusive<i32>,
) -> BTreeMap<i32, f64> {
    years
        .filter_map(|y| {
            let denominator = series.flow(class_b, y);
            (denominator != 0.0).then(|| (y, series.flow(class_a, y) / denominator))
        })
        .collect()
}

/// Smallest year from which `class_b` strictly out-flows `class_a` in every
/// observed year, provided `class_a` held at least even in some earlier
/// observed year. Observed years are those with an entry for either class.
pub fn crossover_year(series: &ClassFlowSeries, class_a: &str, class_b: &str) -> Option<i32> {
    let years: BTreeSet<i32> = series
        .entries
        .keys()
        .filter(|(c, _)| c == class_a || c == class_b)
        .map(|&(_, y)| y)
        .collect();
    let years: Vec<i32> = years.into_iter().collect();
    let mut start = years.len();
    while start > 0 {
        let y = years[start - 1];
        if series.flow(class_b, y) > series.flow(class_a, y) {
            start -= 1;
        } else {
            break;
        }
    }
    // start == len: the last year is not b-dominated. start == 0: no earlier
    // regime in which a held.
    (start > 0 && start < years.len()).then(|| years[start])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionReason {
    Owned,
    CitesOwned,
    CitedByOwned,
}

/// Patents owned by an assignee together with their direct citation
/// neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionSet {
    /// Normalized assignee.
    pub assignee: String,
    pub owned: BTreeSet<NodeIndex>,
    /// Non-owned patents citing an owned one.
    pub cites_owned: BTreeSet<NodeIndex>,
    /// Non-owned patents cited by an owned one.
    pub cited_by_owned: BTreeSet<NodeIndex>,
}

#[derive(Serialize)]
struct ExclusionReportJson<'a> {
    assignee: &'a str,
    excluded: usize,
    owned: usize,
    cites_owned: usize,
    cited_by_owned: usize,
}

impl ExclusionSet {
    pub fn excluded(&self) -> BTreeSet<NodeIndex> {
        self.owned
            .iter()
            .chain(&self.cites_owned)
            .chain(&self.cited_by_owned)
            .copied()
            .collect()
    }

    pub fn contains(&self, node: NodeIndex) -> bool {
        self.owned.contains(&node)
            || self.cites_owned.contains(&node)
            || self.cited_by_owned.contains(&node)
    }

    /// Tags of `node`; a non-owned node may carry both neighbor tags.
    pub fn reasons(&self, node: NodeIndex) -> Vec<ExclusionReason> {
        [
            (ExclusionReason::Owned, &self.owned),
            (ExclusionReason::CitesOwned, &self.cites_owned),
            (ExclusionReason::CitedByOwned, &self.cited_by_owned),
        ]
        .into_iter()
        .filter(|(_, set)| set.contains(&node))
        .map(|(reason, _)| reason)
        .collect()
    }

    pub fn report_json(&self) -> serde_json::Value {
        serde_json::to_value(ExclusionReportJson {
            assignee: &self.assignee,
            excluded: self.excluded().len(),
            owned: self.owned.len(),
            cites_owned: self.cites_owned.len(),
            cited_by_owned: self.cited_by_owned.len(),
        })
        .expect("exclusion report serializes")
    }
}

/// Builds the exclusion set for `assignee`, matched after trimming and
/// case-folding. A blank assignee owns nothing.
pub fn assignee_exclusion_set(dataset: &PatentDataset, assignee: &str) -> ExclusionSet {
    let wanted = normalize_assignee(assignee);
    let graph = dataset.graph();
    let owned: BTreeSet<NodeIndex> = if wanted.is_empty() {
        BTreeSet::new()
    } else {
        graph
            .nodes()
            .filter(|&u| normalize_assignee(&dataset.meta(u).assignee) == wanted)
            .collect()
    };
    let mut cites_owned = BTreeSet::new();
    let mut cited_by_owned = BTreeSet::new();
    for &c in &owned {
        cites_owned.extend(graph.in_neighbors(c).iter().filter(|u| !owned.contains(u)));
        cited_by_owned.extend(graph.out_neighbors(c).iter().filter(|v| !owned.contains(v)));
    }
    ExclusionSet {
        assignee: wanted,
        owned,
        cites_owned,
        cited_by_owned,
    }
}

/// Output of [`excluded_flow_pipeline`].
#[derive(Debug, Clone)]
pub struct ExcludedFlow {
    pub exclusion: ExclusionSet,
    pub reduced: PatentDataset,
    pub ranks: PageRankResult,
    pub series: ClassFlowSeries,
}

/// Drops the assignee's neighborhood, recomputes PageRank on what remains
/// and aggregates the inflow series there.
pub fn excluded_flow_pipeline(
    dataset: &PatentDataset,
    assignee: &str,
    target_class: &str,
    metric: FlowMetric,
    params: &PageRankParams,
) -> Result<ExcludedFlow> {
    let exclusion = assignee_exclusion_set(dataset, assignee);
    let mask: Vec<bool> = dataset
        .graph()
        .nodes()
        .map(|u| !exclusion.contains(u))
        .collect();
    let (reduced, _) = dataset.restrict(&mask);
    if reduced.node_count() == 0 {
        return Err(Error::EmptyReducedGraph {
            assignee: assignee.to_owned(),
        });
    }
    let ranks = pagerank(reduced.graph(), params)?;
    let series = class_inflow_series(&reduced, &ranks, target_class, metric)?;
    Ok(ExcludedFlow {
        exclusion,
        reduced,
        ranks,
        series,
    })
}

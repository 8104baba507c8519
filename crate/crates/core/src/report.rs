//! Ranking tables and score exports.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::graph::NodeIndex;
use crate::ingest::PatentDataset;
use crate::pagerank::PageRankResult;

/// Multiplier used by the scaled score presentation.
pub const SCORE_SCALE: f64 = 1e8;

/// Scientific notation with 17 significant digits; round-trips any `f64`.
pub fn fmt_score(x: f64) -> String {
    format!("{x:.16e}")
}

/// `score * 1e8` rounded half-to-even.
pub fn scaled_score(x: f64) -> i64 {
    (x * SCORE_SCALE).round_ties_even() as i64
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Writes `node_index<TAB>external_id<TAB>score` for every node.
pub fn write_scores_tsv<W: Write>(
    mut w: W,
    dataset: &PatentDataset,
    result: &PageRankResult,
) -> io::Result<()> {
    for u in dataset.graph().nodes() {
        writeln!(
            w,
            "{}\t{}\t{}",
            u,
            dataset.id(u),
            fmt_score(result.score(u))
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub rank: usize,
    pub node: NodeIndex,
    pub patent_id: String,
    pub class: Option<String>,
    pub title: Option<String>,
    pub ncit: usize,
    /// One score per damping value, in [`RankTable::dampings`] order.
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub dampings: Vec<f64>,
    pub principal: f64,
    /// Present scores as integers of `score * 1e8` in the text rendering.
    pub scaled: bool,
    pub rows: Vec<RankRow>,
}

/// Top `n` patents by score at `principal_d`; ties go to the higher citation
/// count, then to the lexicographically smaller patent id.
pub fn top_table(
    dataset: &PatentDataset,
    results: &[PageRankResult],
    n: usize,
    principal_d: f64,
    scaled: bool,
) -> Result<RankTable> {
    let principal = results
        .iter()
        .find(|r| (r.damping() - principal_d).abs() < 1e-12)
        .ok_or(Error::UnknownDamping(principal_d))?;
    for r in results {
        if r.scores.len() != dataset.node_count() {
            return Err(Error::LengthMismatch {
                left: r.scores.len(),
                right: dataset.node_count(),
            });
        }
    }
    let graph = dataset.graph();
    let order = |&a: &NodeIndex, &b: &NodeIndex| -> Ordering {
        principal
            .score(b)
            .total_cmp(&principal.score(a))
            .then_with(|| graph.in_degree(b).cmp(&graph.in_degree(a)))
            .then_with(|| dataset.id(a).cmp(dataset.id(b)))
    };

    let mut nodes: Vec<NodeIndex> = graph.nodes().collect();
    let n = n.min(nodes.len());
    if n > 0 && n < nodes.len() {
        nodes.select_nth_unstable_by(n - 1, order);
    }
    nodes.truncate(n);
    nodes.sort_unstable_by(order);

    let rows = nodes
        .into_iter()
        .enumerate()
        .map(|(k, u)| RankRow {
            rank: k + 1,
            node: u,
            patent_id: dataset.id(u).to_owned(),
            class: dataset.meta(u).primary_class.clone(),
            title: None,
            ncit: graph.in_degree(u),
            scores: results.iter().map(|r| r.score(u)).collect(),
        })
        .collect();
    Ok(RankTable {
        dampings: results.iter().map(|r| r.damping()).collect(),
        principal: principal_d,
        scaled,
        rows,
    })
}

impl RankTable {
    fn render_score(&self, x: f64) -> String {
        if self.scaled {
            scaled_score(x).to_string()
        } else {
            fmt_score(x)
        }
    }

    /// Column-aligned text; scores scaled when the table's flag is set.
    pub fn to_text(&self) -> String {
        let score_label = if self.scaled { "PRx1e8" } else { "PR" };
        let mut header = vec![
            "Rank".to_owned(),
            "Patent".to_owned(),
            "Class".to_owned(),
            "NCIT".to_owned(),
        ];
        header.extend(self.dampings.iter().map(|d| format!("{score_label} d={d}")));
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = vec![
                    r.rank.to_string(),
                    r.patent_id.clone(),
                    r.class.clone().unwrap_or_else(|| "-".into()),
                    r.ncit.to_string(),
                ];
                cells.extend(r.scores.iter().map(|&s| self.render_score(s)));
                cells
            })
            .collect();

        let mut widths: Vec<usize> = header.iter().map(String::len).collect();
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&header).chain(&body) {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(k, (cell, &w))| {
                    // Patent id and class left-aligned, numbers right-aligned.
                    if k == 1 || k == 2 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }

    /// CSV with full-precision scores.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header = String::from("rank,patent_id,class,ncit");
        for d in &self.dampings {
            let _ = write!(header, ",score_d{d}");
        }
        writeln!(w, "{header}")?;
        for r in &self.rows {
            write!(
                w,
                "{},{},{},{}",
                r.rank,
                csv_field(&r.patent_id),
                csv_field(r.class.as_deref().unwrap_or("")),
                r.ncit
            )?;
            for &s in &r.scores {
                write!(w, ",{}", fmt_score(s))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

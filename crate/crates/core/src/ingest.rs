//! TSV ingestion for citation edges and patent metadata.
//!
//! `citations.tsv` holds `citing_id<TAB>cited_id` and `patents.tsv` holds
//! `patent_id<TAB>class<TAB>year<TAB>assignee`. Both accept `#` comment lines
//! and blank lines. Bad lines are skipped and counted, never fatal.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::graph::{CitationGraph, GraphBuildReport, IndexRemap, NodeIndex};

pub const MIN_YEAR: i32 = 1790;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatentMeta {
    pub patent_id: String,
    pub primary_class: Option<String>,
    pub grant_year: Option<i32>,
    pub assignee: String,
}

impl PatentMeta {
    pub fn placeholder(patent_id: impl Into<String>) -> PatentMeta {
        PatentMeta {
            patent_id: patent_id.into(),
            primary_class: None,
            grant_year: None,
            assignee: String::new(),
        }
    }
}

/// Canonical form used for assignee matching: trimmed and case-folded.
pub fn normalize_assignee(raw: &str) -> String {
    raw.trim().to_lowercase()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CitationParseReport {
    pub lines: usize,
    pub pairs: usize,
    pub blank: usize,
    pub comment: usize,
    pub malformed: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MetadataParseReport {
    pub lines: usize,
    pub records: usize,
    pub blank: usize,
    pub comment: usize,
    pub malformed: usize,
    pub duplicates: usize,
    pub unknown_years: usize,
}

enum Line<'a> {
    Blank,
    Comment,
    Fields(&'a str),
}

fn classify(line: &str) -> Line<'_> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.trim().is_empty() {
        Line::Blank
    } else if line.starts_with('#') {
        Line::Comment
    } else {
        Line::Fields(line)
    }
}

/// Reads `citing<TAB>cited` pairs in input order.
pub fn parse_citations<R: BufRead>(
    reader: R,
) -> io::Result<(Vec<(String, String)>, CitationParseReport)> {
    let mut report = CitationParseReport::default();
    let mut pairs = Vec::new();
    for line in reader.lines() {
        let line = line?;
        report.lines += 1;
        match classify(&line) {
            Line::Blank => report.blank += 1,
            Line::Comment => report.comment += 1,
            Line::Fields(body) => {
                let mut fields = body.split('\t');
                match (fields.next(), fields.next(), fields.next()) {
                    (Some(citing), Some(cited), None)
                        if !citing.trim().is_empty() && !cited.trim().is_empty() =>
                    {
                        pairs.push((citing.trim().to_owned(), cited.trim().to_owned()));
                    }
                    _ => report.malformed += 1,
                }
            }
        }
    }
    report.pairs = pairs.len();
    Ok((pairs, report))
}

/// Reads patent metadata records. A repeated id keeps the position of its
/// first occurrence and the content of its last.
pub fn parse_metadata<R: BufRead>(reader: R) -> io::Result<(Vec<PatentMeta>, MetadataParseReport)> {
    let mut report = MetadataParseReport::default();
    let mut metas: Vec<PatentMeta> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for line in reader.lines() {
        let line = line?;
        report.lines += 1;
        let body = match classify(&line) {
            Line::Blank => {
                report.blank += 1;
                continue;
            }
            Line::Comment => {
                report.comment += 1;
                continue;
            }
            Line::Fields(body) => body,
        };
        let fields: Vec<&str> = body.split('\t').collect();
        if fields.len() > 4 || fields[0].trim().is_empty() {
            report.malformed += 1;
            continue;
        }
        let field = |i: usize| fields.get(i).map(|s| s.trim()).unwrap_or("");
        let grant_year = field(2)
            .parse::<i32>()
            .ok()
            .filter(|y| (MIN_YEAR..=MAX_YEAR).contains(y));
        if grant_year.is_none() {
            report.unknown_years += 1;
        }
        let meta = PatentMeta {
            patent_id: field(0).to_owned(),
            primary_class: Some(field(1)).filter(|c| !c.is_empty()).map(str::to_owned),
            grant_year,
            assignee: field(3).to_owned(),
        };
        match seen.get(&meta.patent_id) {
            Some(&pos) => {
                report.duplicates += 1;
                metas[pos] = meta;
            }
            None => {
                seen.insert(meta.patent_id.clone(), metas.len());
                metas.push(meta);
            }
        }
    }
    report.records = metas.len();
    Ok((metas, report))
}

/// Anomaly counts gathered while loading a dataset. Serialized to JSON as
/// the build report.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DatasetReport {
    pub nodes: usize,
    pub edges: usize,
    pub placeholders: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citations: Option<CitationParseReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<MetadataParseReport>,
    pub graph: GraphBuildReport,
}

/// A citation graph joined to per-patent metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatentDataset {
    graph: CitationGraph,
    meta: Vec<PatentMeta>,
    placeholder: Vec<bool>,
    id_map: HashMap<String, NodeIndex>,
    report: DatasetReport,
}

/// Joins edges over external ids with metadata records.
///
/// Metadata records take indices in their given order. Ids that appear only
/// in `edges` follow, sorted by id, with placeholder metadata.
pub fn assemble_dataset(edges: &[(String, String)], metas: Vec<PatentMeta>) -> PatentDataset {
    let mut id_map: HashMap<String, NodeIndex> = HashMap::with_capacity(metas.len());
    let mut meta = Vec::with_capacity(metas.len());
    for m in metas {
        // Callers normally pass parse_metadata output, which is unique; a
        // repeated id here also resolves to the last record.
        if let Some(&existing) = id_map.get(&m.patent_id) {
            meta[existing.index()] = m;
            continue;
        }
        id_map.insert(m.patent_id.clone(), NodeIndex::from(meta.len()));
        meta.push(m);
    }
    let mut placeholder = vec![false; meta.len()];

    let mut missing: Vec<&str> = edges
        .iter()
        .flat_map(|(a, b)| [a.as_str(), b.as_str()])
        .filter(|id| !id_map.contains_key(*id))
        .collect();
    missing.sort_unstable();
    missing.dedup();
    for id in &missing {
        id_map.insert((*id).to_owned(), NodeIndex::from(meta.len()));
        meta.push(PatentMeta::placeholder(*id));
        placeholder.push(true);
    }

    let indexed: Vec<(NodeIndex, NodeIndex)> =
        edges.iter().map(|(a, b)| (id_map[a], id_map[b])).collect();
    let (graph, graph_report) =
        CitationGraph::build(&indexed, meta.len()).expect("indices assigned from the id map");

    let report = DatasetReport {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        placeholders: missing.len(),
        citations: None,
        metadata: None,
        graph: graph_report,
    };
    PatentDataset {
        graph,
        meta,
        placeholder,
        id_map,
        report,
    }
}

impl PatentDataset {
    pub fn from_readers<C: BufRead, P: BufRead>(citations: C, patents: P) -> io::Result<Self> {
        let (edges, citation_report) = parse_citations(citations)?;
        let (metas, metadata_report) = parse_metadata(patents)?;
        let mut dataset = assemble_dataset(&edges, metas);
        dataset.report.citations = Some(citation_report);
        dataset.report.metadata = Some(metadata_report);
        Ok(dataset)
    }

    pub fn load(citations: impl AsRef<Path>, patents: impl AsRef<Path>) -> Result<Self> {
        let c = BufReader::new(File::open(citations)?);
        let p = BufReader::new(File::open(patents)?);
        Ok(Self::from_readers(c, p)?)
    }

    pub fn graph(&self) -> &CitationGraph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn meta(&self, node: NodeIndex) -> &PatentMeta {
        &self.meta[node.index()]
    }

    pub fn metas(&self) -> &[PatentMeta] {
        &self.meta
    }

    pub fn id(&self, node: NodeIndex) -> &str {
        &self.meta[node.index()].patent_id
    }

    pub fn node(&self, patent_id: &str) -> Option<NodeIndex> {
        self.id_map.get(patent_id).copied()
    }

    pub fn is_placeholder(&self, node: NodeIndex) -> bool {
        self.placeholder[node.index()]
    }

    pub fn report(&self) -> &DatasetReport {
        &self.report
    }

    /// Class and year of a node when both are known.
    pub fn class_year(&self, node: NodeIndex) -> Option<(&str, i32)> {
        let m = &self.meta[node.index()];
        Some((m.primary_class.as_deref()?, m.grant_year?))
    }

    /// Sub-dataset over the nodes with `mask[i] == true`, graph restricted by
    /// [`CitationGraph::induced_subgraph`] semantics.
    pub fn restrict(&self, mask: &[bool]) -> (PatentDataset, IndexRemap) {
        let (graph, remap) = self.graph.induced_by_mask(mask);
        let meta: Vec<PatentMeta> = remap
            .kept()
            .iter()
            .map(|&old| self.meta[old.index()].clone())
            .collect();
        let placeholder: Vec<bool> = remap
            .kept()
            .iter()
            .map(|&old| self.placeholder[old.index()])
            .collect();
        let id_map = meta
            .iter()
            .enumerate()
            .map(|(i, m)| (m.patent_id.clone(), NodeIndex::from(i)))
            .collect();
        let report = DatasetReport {
            nodes: graph.node_count(),
            edges: graph.edge_count(),
            placeholders: placeholder.iter().filter(|&&p| p).count(),
            citations: None,
            metadata: None,
            graph: GraphBuildReport {
                input_edges: graph.edge_count(),
                stored_edges: graph.edge_count(),
                ..Default::default()
            },
        };
        let dataset = PatentDataset {
            graph,
            meta,
            placeholder,
            id_map,
            report,
        };
        (dataset, remap)
    }

    /// Writes every stored edge as `citing<TAB>cited`.
    pub fn write_citations<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (u, v) in self.graph.edges() {
            writeln!(w, "{}\t{}", self.id(u), self.id(v))?;
        }
        Ok(())
    }

    /// Writes metadata for every non-placeholder node in index order.
    pub fn write_metadata<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (m, _) in self.meta.iter().zip(&self.placeholder).filter(|(_, &p)| !p) {
            let year = m.grant_year.map(|y| y.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                m.patent_id,
                m.primary_class.as_deref().unwrap_or(""),
                year,
                m.assignee
            )?;
        }
        Ok(())
    }
}

//! PageRank and class-selective citation-flow analysis for patent citation
//! networks.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`]: immutable compressed adjacency in both directions.
//! * [`ingest`]: TSV parsers for citations and patent metadata, assembled
//!   into a [`PatentDataset`].
//! * [`pagerank`]: synchronous power iteration with dangling-node
//!   redistribution and an L1 stopping rule.
//! * [`trend`]: per-year PageRank inflow into a target class, per-patent
//!   breakdowns, assignee exclusion and crossover detection.
//! * [`report`]: top-N ranking tables across damping values.
//! * [`testkit`]: a dense reference PageRank and a synthetic dataset
//!   generator.

pub mod error;
pub mod graph;
pub mod ingest;
pub mod pagerank;
pub mod report;
pub mod testkit;
pub mod trend;

pub use error::{Error, Result};
pub use graph::{build_graph, CitationGraph, GraphBuildReport, IndexRemap, NodeIndex};
pub use ingest::{
    assemble_dataset, parse_citations, parse_metadata, CitationParseReport, DatasetReport,
    MetadataParseReport, PatentDataset, PatentMeta,
};
pub use pagerank::{
    convergence_delta, pagerank, pagerank_sweep, DanglingMode, PageRankParams, PageRankResult,
    PowerIteration, DAMPING_SWEEP,
};
pub use report::{fmt_score, scaled_score, top_table, write_scores_tsv, RankRow, RankTable};
pub use trend::{
    assignee_exclusion_set, class_inflow_series, class_ratio, crossover_year,
    excluded_flow_pipeline, patent_inflow_breakdown, write_flow_csv, ClassFlowSeries, ExcludedFlow,
    ExclusionReason, ExclusionSet, FlowMetric, PatentBreakdown,
};

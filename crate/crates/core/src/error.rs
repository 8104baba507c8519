use std::io;

use thiserror::Error;

use crate::graph::NodeIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("malformed edge ({citing}, {cited}): node count is {node_count}")]
    MalformedEdge {
        citing: NodeIndex,
        cited: NodeIndex,
        node_count: usize,
    },
    #[error("PageRank is undefined on an empty graph")]
    EmptyGraph,
    #[error("invalid PageRank parameters: {0}")]
    InvalidParams(String),
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("dense reference limited to {limit} nodes, graph has {node_count}")]
    OracleTooLarge { node_count: usize, limit: usize },
    #[error("damping value {0} is not among the computed results")]
    UnknownDamping(f64),
    #[error("excluding assignee {assignee:?} leaves an empty graph")]
    EmptyReducedGraph { assignee: String },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("unknown patent id {0:?}")]
    UnknownPatent(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

use thiserror::Error;

use crate::limit_sampler::SamplerDiagnostics;
use crate::multigraph::VertexId;
use crate::processes::FullProcessState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no such vertex: {0}")]
    NoSuchVertex(VertexId),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node {0} is not a leaf of the tree")]
    NotALeaf(usize),

    #[error("node {0} is not in the tree")]
    NoSuchNode(usize),

    /// The process outgrew the vertex cap; the state at the moment of failure
    /// is kept so callers can inspect how far it got.
    #[error("vertex cap of {cap} exceeded at time {time:.4}")]
    VertexCap {
        cap: usize,
        time: f64,
        state: Box<FullProcessState>,
    },

    #[error("population cap of {cap} exceeded at time {time:.4}")]
    PopulationCap { cap: usize, time: f64 },

    #[error("sampler cap exceeded: {reason}")]
    SamplerCap {
        reason: String,
        diagnostics: Box<SamplerDiagnostics>,
    },

    #[error("sample budget of {budget} exhausted after {hits} conditional hits")]
    BudgetExhausted { budget: usize, hits: usize },

    #[error("insufficient samples: {got} < {needed}")]
    InsufficientSamples { got: u64, needed: u64 },

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed token {token:?}")]
    Malformed { line: usize, token: String },

    #[error("no edges")]
    NoEdges,

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("edge ({src}, {dst}) references a node outside 0..{node_count}")]
    EndpointOutOfRange { src: u32, dst: u32, node_count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("draw count {draws} exceeds community edge count {edges}")]
    TooManyDraws { draws: u64, edges: u64 },

    #[error("non-finite position for node {node} at iteration {iteration}")]
    NonFinite { iteration: usize, node: usize },

    #[error("node {node} has label {label} with no color class")]
    UnresolvedLabel { node: usize, label: u32 },

    #[error("{stage} stage failed")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("topology must contain at least one node")]
    EmptyTopology,
    #[error("node {0} has a non-finite coordinate")]
    NonFiniteCoordinate(usize),
    #[error("nodes {0} and {1} sit at identical coordinates")]
    DuplicateCoordinates(usize, usize),
    #[error("node index {index} out of range for {nodes} nodes")]
    IndexOutOfRange { index: usize, nodes: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("invalid model parameter: {0}")]
    InvalidModel(String),
    #[error("{0}")]
    Precondition(String),
    #[error(
        "node {node} has {size} neighbors, above the cap of {cap}; tighten the neighbor policy"
    )]
    NeighborCapExceeded {
        node: usize,
        size: usize,
        cap: usize,
    },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("search budget of {0} node expansions exhausted before any feasible plan")]
    BudgetExhausted(u64),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

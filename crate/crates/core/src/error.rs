use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by graph construction, inference, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({i}, {i}) is a self-loop")]
    SelfLoop { i: usize },

    #[error("edge ({i}, {j}) has non-positive or non-finite weight {w}")]
    InvalidWeight { i: usize, j: usize, w: f64 },

    #[error("edge ({i}, {j}) appears more than once")]
    DuplicateEdge { i: usize, j: usize },

    #[error("node index {index} out of range for a graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("{what}: expected length {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("symmetric eigensolver did not converge")]
    EigenNonConvergence,

    #[error("graph is not connected")]
    Disconnected,

    #[error("no connected graph within {attempts} attempts")]
    ConnectivityNotAchieved { attempts: usize },

    #[error("signal has zero sample variance")]
    ZeroVariance,

    #[error("requested {m} outliers on a graph with {n} nodes")]
    TooManyOutliers { m: usize, n: usize },

    #[error("MAD of the signal is zero; supply tau_delta manually (--tau-delta)")]
    MadDegenerate,

    #[error("signal contains a non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("truth labels contain a single class; AUC is undefined")]
    DegenerateTruth,

    #[error("oracle supports at most {max} nodes, got {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("quadrature grid not converged: refinement moved a probability by {change:.3e}")]
    GridNotConverged { change: f64 },

    #[error("{failed} of {total} trials failed")]
    BatchFailed { failed: usize, total: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid edge {src}->{dst}: {reason}")]
    InvalidEdge { src: u64, dst: u64, reason: String },

    #[error("label {label} of node {node} is out of range (expected < {count})")]
    LabelOutOfRange {
        node: usize,
        label: u32,
        count: usize,
    },

    #[error("partition covers {got} nodes but the graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("infeasible benchmark spec: {0}")]
    InfeasibleSpec(String),

    #[error("partition from {threads} thread(s) differs from the single-thread baseline")]
    DeterminismBreach { threads: usize },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig(message.into())
    }

    /// Attaches a path to a bare I/O error.
    pub fn with_path(self, path: impl Into<PathBuf>) -> Self {
        match self {
            Error::Io(source) => Error::File {
                path: path.into(),
                source,
            },
            other => other,
        }
    }
}

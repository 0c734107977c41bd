use thiserror::Error;

/// Errors raised by the numerical kernels, solvers and file formats.
#[derive(Debug, Error)]
pub enum RpcaError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("rank {rank} out of range for a {rows}x{cols} matrix")]
    RankOutOfRange {
        rank: usize,
        rows: usize,
        cols: usize,
    },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("{0} must be a nonzero matrix")]
    ZeroMatrix(&'static str),

    #[error("malformed matrix header: {0}")]
    MalformedHeader(String),

    #[error("ragged rows: line {line} has {found} columns, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("could not parse value {token:?} on line {line}")]
    Parse { line: usize, token: String },

    #[error("empty matrix")]
    EmptyMatrix,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RpcaError>;

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pulse configuration: {0}")]
    InvalidPulse(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid search parameters: {0}")]
    InvalidSearch(String),

    #[error("no interior peak in timing objective over the search window")]
    NoPeakFound,

    #[error("split I/Q sampling requires a real-valued constellation")]
    SplitNeedsRealConstellation,

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("frame length {l} must exceed filter half-span {k}")]
    FrameTooShort { l: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("linear solver failure: regularized system is numerically singular")]
    SolverFailure,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("malformed CSV {path}: {reason}")]
    CsvFormat { path: PathBuf, reason: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

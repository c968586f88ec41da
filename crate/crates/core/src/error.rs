use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),

    #[error("degenerate input: row {row} has zero norm")]
    ZeroNormRow { row: usize },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("sample {index} has no positive partner (singleton identity)")]
    NoPositivePairs { index: usize },

    #[error("sample {index} has no negative partner (single-identity dataset)")]
    NoNegativePairs { index: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("instance too large for the exhaustive solver: {0}")]
    SizeCap(String),

    #[error("training diverged: non-finite loss in epoch {epoch}")]
    Divergence { epoch: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short stable tag used in machine-readable CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Format(_) => "format",
            Error::ZeroNormRow { .. } => "degenerate-input",
            Error::Validation(_) => "validation",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NoPositivePairs { .. } => "no-positive-pairs",
            Error::NoNegativePairs { .. } => "no-negative-pairs",
            Error::EmptyInput(_) => "empty-input",
            Error::SizeCap(_) => "size-cap",
            Error::Divergence { .. } => "divergence",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}: expected {expected} bytes, found {actual}")]
    SizeMismatch {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("non-finite sample in component {component} at index {index}")]
    NonFinite { component: char, index: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("unknown generator kind `{0}`")]
    UnknownKind(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scale mismatch: expected 2^{expected}, found 2^{actual}")]
    ScaleMismatch { expected: i32, actual: i32 },

    #[error("fixed-point overflow at index {index}: |{value}| exceeds 2^{limit_bits}")]
    FixedOverflow {
        index: usize,
        value: i64,
        limit_bits: u32,
    },

    #[error("corrupt archive: {0}")]
    Format(String),

    #[error("stream `{section}` length mismatch: expected {expected} bytes, found {actual}")]
    StreamLength {
        section: &'static str,
        expected: u64,
        actual: u64,
    },

    #[error("huffman table: {0}")]
    Huffman(String),

    #[error("topology invariant violated: {0}")]
    Topology(String),

    #[error("metadata: {0}")]
    Metadata(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Stable short name of the variant, for machine-readable reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::NonFinite { .. } => "non_finite",
            Error::InvalidDims(_) => "invalid_dims",
            Error::InvalidParam(_) => "invalid_param",
            Error::UnknownKind(_) => "unknown_kind",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::ScaleMismatch { .. } => "scale_mismatch",
            Error::FixedOverflow { .. } => "fixed_overflow",
            Error::Format(_) => "format",
            Error::StreamLength { .. } => "stream_length",
            Error::Huffman(_) => "huffman",
            Error::Topology(_) => "topology",
            Error::Metadata(_) => "metadata",
        }
    }
}

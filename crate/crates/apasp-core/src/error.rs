//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by graph I/O, construction, and algorithm entry points.
#[derive(Debug, Error)]
pub enum Error {
    /// A text-format parse failure, annotated with the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Structurally invalid input (bad vertex id, negative weight, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Matrix or vector dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested configuration needs bounded integer weights.
    #[error("weight class violation: {0}")]
    WeightClass(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

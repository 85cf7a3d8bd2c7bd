use std::io;

use thiserror::Error;

/// Errors raised by constructions, detectors and the analysis layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("{value} is not a member of the cube {shell}Q (q = {q})")]
    Membership { value: String, shell: u64, q: u64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    /// An exhaustive search hit its budget. `best_lower_bound` is the
    /// largest feasible size found before giving up, when one exists.
    #[error("resource budget exceeded: {message}")]
    Resource {
        message: String,
        best_lower_bound: Option<usize>,
    },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Problem parameters or a problem file are malformed.
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A dyadic point was requested at a level coarser than its canonical one.
    #[error("level error: point {k}/2^{m} has no index at level {requested}")]
    Level { k: u64, m: u32, requested: u32 },

    #[error("usage error: {0}")]
    Usage(String),

    /// The right-hand side could not be evaluated at (t, x).
    #[error("rhs evaluation failed at (t = {t}, x = {x}): {message}")]
    RhsFailure { t: f64, x: f64, message: String },

    /// Claimed M or L contradicted by a computed value.
    #[error("hypothesis violated at (t = {t}, x = {x}): {detail}")]
    HypothesisViolation { t: f64, x: f64, detail: String },

    #[error("capacity exceeded: {detail}")]
    Capacity {
        detail: String,
        best_bound: Option<f64>,
    },

    #[error("range error: {0}")]
    Range(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn rhs(t: f64, x: f64, e: EvalError) -> Self {
        Error::RhsFailure {
            t,
            x,
            message: e.to_string(),
        }
    }
}

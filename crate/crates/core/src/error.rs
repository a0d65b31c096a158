use thiserror::Error;

use crate::fields::{EvalError, FieldError, ParseError};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("metric is not positive definite at ({x}, {y}, {t}): g11 = {g11}, det = {det}")]
    NotPositiveDefinite {
        x: f64,
        y: f64,
        t: f64,
        g11: f64,
        det: f64,
    },
    #[error("zero horizontal vector")]
    ZeroVector,
    #[error("vectors are based at different points")]
    BaseMismatch,
    #[error("parameter point ({x}, {t}) lies outside the graph domain")]
    OutsideDomain { x: f64, t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

impl From<FieldError> for Error {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Parse(p) => Error::Parse(p),
            FieldError::Eval(v) => Error::Eval(v),
            FieldError::MissingVar(name) => Error::InvalidArgument(format!("missing value for `{name}`")),
        }
    }
}

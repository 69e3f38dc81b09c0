use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),

    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadSpec(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate weight: integral {integral:e} is not above floor {floor:e}")]
    DegenerateWeight { integral: f64, floor: f64 },
}

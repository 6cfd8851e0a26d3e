use thiserror::Error;

use crate::point::ConstraintKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient for coordinate {index} must be finite and nonnegative, got {value}")]
    BadCoefficient { index: usize, value: f64 },

    #[error("weight for coordinate {index} must be finite and positive, got {value}")]
    BadWeight { index: usize, value: f64 },

    #[error("coordinate {index} out of range for dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("parameter {name} = {value} outside its allowed range")]
    BadParameter { name: &'static str, value: f64 },

    #[error("expected a {expected:?} constraint")]
    WrongKind { expected: ConstraintKind },

    #[error("covering constraint has no nonzero coefficient and can never be satisfied")]
    EmptyCovering,

    #[error("{kind:?} constraint is not violated (value {value})")]
    NotViolated { kind: ConstraintKind, value: f64 },

    #[error("root finding did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("body separation loop hit its cap of {iterations} rounds; last violated {kind:?} constraint had value {value}")]
    SeparationCap {
        iterations: usize,
        kind: ConstraintKind,
        value: f64,
    },

    #[error("negative multiplier {0}")]
    NegativeMultiplier(f64),

    #[error("certificate check failed: {0}")]
    Certificate(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex exceeded {0} pivots")]
    PivotLimit(usize),

    #[error("instance too large for the exact oracle: {size} > cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("update rejected: {0}")]
    Rejected(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("update {index}: {source}")]
    AtUpdate {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}

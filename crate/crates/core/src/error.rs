use thiserror::Error;

use crate::grid::DyadicInterval;

pub type Result<T> = std::result::Result<T, DyadicError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DyadicError {
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("interval {0} is below resolution")]
    BelowResolution(DyadicInterval),

    #[error("interval {0} lies outside the window and is not an ancestor")]
    NotInWindow(DyadicInterval),

    #[error("halves of interval {0} are unresolvable at this resolution")]
    UnresolvableHalves(DyadicInterval),

    #[error("alpha must lie in U_m (not all ones)")]
    AlphaAllOnes,

    #[error("expected {expected} functions, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("functions do not share one window")]
    WindowMismatch,

    #[error("cell vector has length {got}, window requires {expected}")]
    CellCount { expected: usize, got: usize },

    #[error("slot {slot} out of range 1..={arity}")]
    SlotOutOfRange { slot: usize, arity: usize },

    #[error("weight cell {cell} has non-positive or non-finite value {value}")]
    NonPositiveWeight { cell: usize, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("no cells")]
    NoCells,

    #[error("io error: {0}")]
    Io(String),
}

impl DyadicError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        DyadicError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for DyadicError {
    fn from(e: std::io::Error) -> Self {
        DyadicError::Io(e.to_string())
    }
}

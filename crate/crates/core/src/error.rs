use thiserror::Error;

use crate::epset::EpSet;

pub type Result<T> = std::result::Result<T, UgkError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum UgkError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("vertex {vertex} emits no edge (sinks are not allowed)")]
    NoSink { vertex: u64 },

    #[error("range of edge {edge} is not a finite union of minimal infinite emitters and vertices (infinite remainder {remainder})")]
    RfumViolation { edge: String, remainder: EpSet },

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("set {0} is not a generalized vertex with a finite remainder")]
    NotGeneralizedVertex(EpSet),

    #[error("concatenation undefined: {0}")]
    Undefined(String),

    #[error("shift is undefined on points of length zero")]
    UndefinedOnLengthZero,

    #[error("point is not in the source cylinder")]
    NotInSource,

    #[error("cylinders have different prefixes")]
    PrefixMismatch,

    #[error("normal form exceeded {0} cylinders")]
    NormalizationOverflow(usize),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no witness for {what} within bound {bound}")]
    WitnessNotFound { what: String, bound: usize },

    #[error("fewer than the requested disjoint loops within bound {bound}")]
    InsufficientLoops { bound: usize },

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

impl UgkError {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        UgkError::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}

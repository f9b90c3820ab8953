use std::fmt;

use serde::Serialize;

use crate::model::Half;

/// One intermediate value (or half of one) that a node failed to obtain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MissingValue {
    /// 1-based node id.
    pub node: usize,
    /// 1-based file id.
    pub file: u64,
    pub half: Half,
}

impl fmt::Display for MissingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.half {
            Half::Whole => write!(f, "(node {}, file {})", self.node, self.file),
            h => write!(f, "(node {}, file {}, {})", self.node, self.file, h.as_str()),
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("total storage {total} is smaller than the file count {n}")]
    FeasibilityViolation { total: u64, n: u64 },
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    #[error("undecodable plan, missing {}", join(.missing))]
    Undecodable { missing: Vec<MissingValue> },
    #[error("reduce failed for (node, file) pairs {mismatches:?}")]
    ReduceFailure { mismatches: Vec<(usize, u64)> },
    #[error("enumeration needs {required} steps, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("{what} too large: {count} exceeds cap {cap}")]
    TooLarge { what: String, count: u128, cap: u128 },
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("malformed document: {0}")]
    Parse(String),
}

impl Error {
    /// Stable variant name, printed by the CLI on domain errors.
    pub fn name(&self) -> &'static str {
        match self {
            Error::FeasibilityViolation { .. } => "FeasibilityViolation",
            Error::BadDimension(_) => "BadDimension",
            Error::InvalidAllocation(_) => "InvalidAllocation",
            Error::InternalContradiction(_) => "InternalContradiction",
            Error::Undecodable { .. } => "Undecodable",
            Error::ReduceFailure { .. } => "ReduceFailure",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::TooLarge { .. } => "TooLarge",
            Error::Unbounded => "Unbounded",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

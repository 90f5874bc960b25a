//! Crate-wide error type.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A partition index appears in more than one group.
    OverlappingGroups { index: usize },
    /// A partition leaves some index uncovered.
    IncompleteCover { missing: usize },
    /// A group larger than the sparsity budget `k`.
    GroupTooLarge { group: usize, len: usize, k: usize },
    /// A group with no members.
    EmptyGroup { group: usize },
    /// An index outside the ambient dimension.
    IndexOutOfRange { index: usize, n: usize },
    /// Exhaustive enumeration would exceed the caller-supplied cap.
    EnumerationCapExceeded { cap: usize },
    /// A vector or matrix with the wrong dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// Two tree node sets that overlap without nesting.
    LaminarViolation { a: usize, b: usize },
    /// The partition admits no pair of disjoint group unions.
    NoDisjointPairsAvailable,
    /// No closed-form norm-equivalence constants for this norm/partition.
    UnsupportedNormForClosedForm,
    /// The operation is not available for this norm variant.
    UnsupportedNorm,
    /// A parameter that must be strictly positive was not.
    NonPositiveParameter { name: &'static str },
    /// A parameter outside its valid range.
    InvalidRange { name: &'static str },
    /// The isometry constant is too large for the bound to apply.
    DeltaTooLarge { delta2k: f64 },
    /// The compressibility condition fails; bound coefficients are infinite.
    NotCompressible,
    /// The feasible set of the recovery problem is empty.
    InfeasibleProblem,
    /// The requested signal support exceeds the sparsity budget.
    SupportExceedsBudget { cardinality: usize, k: usize },
    /// Malformed input file or JSON document.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OverlappingGroups { index } => {
                write!(f, "index {index} belongs to more than one group")
            }
            Error::IncompleteCover { missing } => {
                write!(f, "index {missing} is not covered by any group")
            }
            Error::GroupTooLarge { group, len, k } => {
                write!(f, "group {group} has {len} members, exceeding k = {k}")
            }
            Error::EmptyGroup { group } => write!(f, "group {group} is empty"),
            Error::IndexOutOfRange { index, n } => {
                write!(f, "index {index} out of range for dimension {n}")
            }
            Error::EnumerationCapExceeded { cap } => {
                write!(f, "exhaustive enumeration exceeds the cap of {cap} sets")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::LaminarViolation { a, b } => {
                write!(f, "node sets {a} and {b} overlap without nesting")
            }
            Error::NoDisjointPairsAvailable => {
                write!(f, "partition admits no disjoint pair of group unions")
            }
            Error::UnsupportedNormForClosedForm => {
                write!(f, "no closed-form constants for this norm; use the empirical estimator")
            }
            Error::UnsupportedNorm => write!(f, "operation not available for this norm variant"),
            Error::NonPositiveParameter { name } => {
                write!(f, "parameter `{name}` must be strictly positive")
            }
            Error::InvalidRange { name } => write!(f, "parameter `{name}` is out of range"),
            Error::DeltaTooLarge { delta2k } => {
                write!(f, "delta_2k = {delta2k} is not below 1; the estimate does not apply")
            }
            Error::NotCompressible => {
                write!(f, "compressibility condition fails; bound coefficients are infinite")
            }
            Error::InfeasibleProblem => write!(f, "the feasible set is empty"),
            Error::SupportExceedsBudget { cardinality, k } => {
                write!(f, "chosen support has cardinality {cardinality}, exceeding k = {k}")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

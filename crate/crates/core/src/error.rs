use alloc::string::String;

use crate::lp::LpError;

/// Errors raised by constructors and operations of the kernel.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("operation requires a probability measure, got a signed measure")]
    UnsupportedKind,
    #[error("operation is only defined for one-dimensional outcomes, got dimension {0}")]
    RequiresScalar(usize),
    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("negative mass at atom {0}")]
    NegativeMass(usize),
    #[error("zero mass at atom {0} of a signed measure")]
    ZeroMass(usize),
    #[error("measure has no atoms of positive mass")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{what} must be strictly increasing (violated at index {index})")]
    NotIncreasing { what: &'static str, index: usize },
    #[error("{what} must be nondecreasing (violated at index {index})")]
    NotMonotone { what: &'static str, index: usize },
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: &'static str },
    #[error("probability level {0} outside (0,1]")]
    LevelOutOfRange(f64),
    #[error("coefficient {0} must be nonnegative")]
    NegativeCoefficient(f64),
    #[error("mixture weight {0} outside [0,1]")]
    WeightOutOfRange(f64),
    #[error("level at index {0} is not a level of the quantile function")]
    UnreachableLevel(usize),
    #[error("utility is not defined at the requested outcome")]
    OutsideDomain,
    #[error("pair {0} does not satisfy z >= v componentwise")]
    UnorderedPair(usize),
    #[error("distortion must satisfy w(1) = 1")]
    Unnormalized,
    #[error("malformed preference dataset: {0}")]
    MalformedDataset(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

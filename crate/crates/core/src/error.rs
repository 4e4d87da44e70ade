use crate::rational::{ParseRationalError, Rational};

/// Errors raised by the library.
///
/// Negative mathematical outcomes (a failed inequality, a missing witness) are
/// never errors; they are reported through the result types. Errors are either
/// bad input ([`Error::is_internal`] is false) or a broken internal invariant.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: expected {expected} entries in row {row}, found {found}")]
    DimensionMismatch { row: usize, expected: usize, found: usize },
    #[error("duplicate point name {0:?}")]
    DuplicateName(String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("points {0:?} and {1:?} have identical coordinates")]
    DuplicateVector(String, String),
    #[error("at least {needed} points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("no distance given for the pair ({0}, {1})")]
    MissingEdge(String, String),
    #[error("conflicting distances for the pair ({0}, {1})")]
    ConflictingEdge(String, String),
    #[error("space document must contain exactly one of `matrix`, `edges`, `l1`")]
    AmbiguousSpaceSource,
    #[error("the two points of the pair must differ (got {0:?} twice)")]
    SamePoint(String),
    #[error("point {0:?} is outside the function's domain")]
    OutsideDomain(String),
    #[error("function value at the base point must be 0, found {0}")]
    NonzeroAtBase(Rational),
    #[error("molecule lists point {0:?} more than once")]
    DuplicateTerm(String),
    #[error("molecule coefficient at {0:?} is zero")]
    ZeroCoefficient(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error signals a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

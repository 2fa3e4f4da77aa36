use crate::scalar::FieldTag;
use thiserror::Error;

/// Library-wide error type. Variants that correspond to rejecting a
/// caller-supplied object carry enough data to print a replayable witness.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("representation mismatch: {left} vs {right}")]
    RepresentationMismatch { left: FieldTag, right: FieldTag },

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported configuration: {0}")]
    Config(String),

    #[error("pair is not in the form group: q0(w) - t = {residual} lies outside the base subset")]
    NotInT { residual: String },

    #[error("subspace is not singular: {0}")]
    NonSingular(String),

    #[error("point already lies in the subspace")]
    PointInSubspace,

    #[error("vector has zero coordinate part")]
    ZeroCoordinates,

    #[error("scalar {value} is outside the chosen total subring")]
    NotInSubring { value: String },

    #[error("residue class of {value} is not invertible")]
    ResidueNotInvertible { value: String },

    #[error("generator index {index} is unsupported here (rank {l})")]
    UnsupportedGeneratorIndex { index: usize, l: usize },

    #[error("coset case could not be decided by the bounded search")]
    UndecidedCase,

    #[error("malformed target point: {0}")]
    MalformedTargetPoint(String),

    #[error("condition {condition} failed: {witness}")]
    ConditionFailed {
        condition: &'static str,
        witness: String,
    },

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI maps this error to.
    ///
    /// 1 = a verification check failed, 2 = bad configuration or literal
    /// syntax, 3 = internal inconsistency, 4 = structurally valid input that
    /// denotes an invalid object (not singular, not in the group, ...).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Config(_) => 2,
            Error::ConditionFailed { .. } => 1,
            Error::Internal(_) => 3,
            _ => 4,
        }
    }
}

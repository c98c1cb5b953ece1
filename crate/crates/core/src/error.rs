//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building scalar groups, lattices,
/// operators, or while parsing user input.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Logarithm of zero requested.
    #[error("logarithm of zero")]
    LogOfZero,

    /// Two vectors that should live in the same lattice have different lengths.
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    /// A scalar claimed to be a primitive root of unity is not one.
    #[error("{0} is not a primitive root of unity of order {1}")]
    NotPrimitiveRoot(String, usize),

    /// Matrix dimensions do not agree.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// An index is outside the valid range.
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    /// A parameter is outside its admissible set.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A string could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A matrix-valued element does not lie in the graded basis span.
    #[error("element is not in graded basis form: {0}")]
    NotBasisForm(String),
}

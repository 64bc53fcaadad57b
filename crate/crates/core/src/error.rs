use thiserror::Error;

use crate::TransformKind;

/// Errors reported by kernels, plans, and the oracle.
///
/// Every check runs before any output is written.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DstError {
    /// A buffer length violates the constraint the operation needs.
    #[error("invalid length {len}: {constraint}")]
    Size {
        len: usize,
        constraint: &'static str,
    },

    /// Plan and call site disagree on kind or size.
    #[error("plan mismatch: {0}")]
    Plan(String),

    /// A non-finite sample was found on entry.
    #[error("non-finite input at index {index}: {value}")]
    Numeric { index: usize, value: f64 },

    /// Matrix/vector dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// An argument is outside its permitted range.
    #[error("{name} = {value} out of range [{min}, {max}]")]
    Range {
        name: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    /// A closed-form count evaluated to a non-integer.
    #[error("count formula for {kind} at n = {n} is not integral")]
    NonIntegral { kind: TransformKind, n: usize },
}

pub type Result<T> = std::result::Result<T, DstError>;

pub(crate) fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(DstError::Numeric {
            index,
            value: x[index],
        }),
        None => Ok(()),
    }
}

/// Returns `log2(n)` when `n` is a power of two with `n >= 2`.
pub(crate) fn log2_exact(n: usize) -> Option<u32> {
    if n >= 2 && n.is_power_of_two() {
        Some(n.trailing_zeros())
    } else {
        None
    }
}

use thiserror::Error;

/// Errors raised by the grid, scheme and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("stability violation: alpha = {alpha} exceeds 1/2 (pass allow_unstable to override)")]
    StabilityViolation { alpha: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value produced at level {level}")]
    NonFinite { level: usize },

    #[error("test function support is not covered by the field: corner (x = {x}, t = {t}) lies outside")]
    Coverage { x: f64, t: f64 },

    #[error("summation-by-parts margin violated: corner (x = {x}, t = {t}) needs one more cell of field coverage")]
    Margin { x: f64, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

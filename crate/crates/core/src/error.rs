use thiserror::Error;

/// Errors produced by the PAGE library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PageError {
    /// An image or grid dimension is too small for the operation.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// A parameter is outside its valid range. `field` names the offending parameter.
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Two arrays that must share a shape do not.
    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    /// Input passed to a brute-force oracle exceeds its size guard.
    #[error("oracle input {height}x{width} exceeds the {max}x{max} guard")]
    OracleTooLarge {
        height: usize,
        width: usize,
        max: usize,
    },
}

pub type Result<T> = std::result::Result<T, PageError>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> PageError {
    PageError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

pub(crate) fn check_shape(expected: (usize, usize), actual: (usize, usize)) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(PageError::ShapeMismatch { expected, actual })
    }
}

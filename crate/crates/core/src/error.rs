use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: order must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Odd cycle length is a standing assumption for the algebraic side.
    #[error("unsupported cycle length {0}: N must be odd and at least 3")]
    UnsupportedDimension(usize),

    #[error("{what} = {value} out of range 0..{bound}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("empty generator list")]
    EmptyGenerators,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects cycle lengths outside the odd, `n >= 3` regime.
pub(crate) fn require_odd(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

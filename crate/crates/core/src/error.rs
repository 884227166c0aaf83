use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is rank deficient (pivot {pivot:.3e} at row {row})")]
    RankDeficient { row: usize, pivot: f64 },

    #[error("iterate diverged at step {step}: {reason}")]
    NumericDivergence { step: usize, reason: String },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("degenerate critical-damping candidate (denominator {denominator:.3e})")]
    DegenerateCandidate { denominator: f64 },

    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

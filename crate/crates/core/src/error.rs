//! Error type shared by every solver in the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("strip collapses at tau={tau}")]
    StripCollapse { tau: f64 },

    #[error("point (tau={tau}, x={x}) lies outside the strip")]
    OutsideStrip { tau: f64, x: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("series did not converge within {terms} terms")]
    SeriesCap { terms: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite(_) | Error::SeriesCap { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::number::Twist;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("missing size L={size} ({twist}) in the declared size set")]
    MissingSize { size: usize, twist: Twist },

    #[error("unsupported size set: {0}")]
    UnsupportedSizeSet(String),

    #[error("criterion needs entries (L={l}, pbc), (L={l}, abc) and (L={}, pbc); missing {missing}", 2 * l)]
    MissingCriterionEntry { l: usize, missing: String },

    #[error("dispersion is negative ({value:e}) at k={k}; not a physical band")]
    NegativeDispersion { k: f64, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("Lanczos did not converge after {iterations} iterations (best E0={best_estimate}, residual={residual:e})")]
    NotConverged {
        best_estimate: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NotConverged { .. } | Error::Fit(_))
    }
}

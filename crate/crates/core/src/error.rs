use thiserror::Error;

/// Errors produced anywhere in the analysis and simulation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A degree distribution or ensemble failed validation.
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    /// The operation needs a different channel or perspective than it was given.
    #[error("type mismatch: {0}")]
    Mismatch(String),
    /// Text input (ensemble file, channel syntax, sweep range) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// No integer node/socket assignment matches the ensemble at this block length.
    #[error("degree rounding failed: {0}")]
    Rounding(String),
    /// Threshold bisection endpoints do not bracket the transition.
    #[error("threshold search not bracketed: {0}")]
    NonBracketing(String),
}

pub type Result<T> = std::result::Result<T, Error>;

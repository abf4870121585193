use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {context}: argument {value}")]
    Domain { context: &'static str, value: f64 },

    #[error("Gamma pole at {0}")]
    Pole(f64),

    #[error("unsupported Bessel weight {0}: weights in (0, 1/2) give orders in (-1/2, 0), which are not supported")]
    UnsupportedOrder(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0}: tensor integrals are capped at n = 3")]
    UnsupportedDimension(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("extrapolation did not converge; diagonal estimates {diagonal:?}")]
    NonConvergence { diagonal: Vec<f64>, tableau: Vec<Vec<f64>> },

    #[error("degenerate constant: Gamma pole at argument {argument}")]
    Degenerate { argument: String },

    #[error("kernel singularity: {0}")]
    Singular(String),

    #[error("point outside the cone V > 0 (V = {0})")]
    OutsideCone(f64),

    #[error("capability error: {0}")]
    Capability(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown suite '{name}'; valid suites: {valid}")]
    UnknownSuite { name: String, valid: String },
}

pub type Result<T> = std::result::Result<T, Error>;

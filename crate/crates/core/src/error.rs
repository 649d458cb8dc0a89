use thiserror::Error;

/// Failures raised by the geometry layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("point {point:?} lies outside the chart domain")]
    Domain { point: Vec<f64> },
    #[error("signature error: {0}")]
    Signature(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("misuse: {0}")]
    Misuse(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("not an (LCS) structure: {0}")]
    NotLcs(String),
    #[error("alpha degenerate: |alpha| = {alpha:e} at {point:?}")]
    AlphaDegenerate { alpha: f64, point: Vec<f64> },
    #[error("degenerate induced metric at {point:?} (|det| = {det:e})")]
    DegenerateMetric { point: Vec<f64>, det: f64 },
    #[error("expression error: {0}")]
    Expr(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

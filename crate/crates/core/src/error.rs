use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole of the Gamma function at x = {0}")]
    Pole(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("fixed-point iteration failed at t = {t} after {iterations} iterations")]
    StepFailure { t: f64, iterations: usize },

    #[error("iterate exceeded the blow-up threshold {threshold} at t = {t}")]
    Threshold { t: f64, threshold: f64 },

    #[error("function diverges at t = {t} (pole at {pole})")]
    Divergence { t: f64, pole: f64 },

    #[error("Rayleigh quotient undefined for the zero field")]
    UndefinedQuotient,

    #[error("eigensolver did not converge after {iterations} iterations (best eigenvalue {best_lambda}, residual {residual})")]
    Convergence {
        iterations: usize,
        best_lambda: f64,
        residual: f64,
    },

    #[error("degenerate blow-up exponent: 2 - 2*alpha - k = 0 (k = {k}, alpha = {alpha})")]
    DegenerateExponent { k: f64, alpha: f64 },

    #[error("parameter regime not covered: {0}")]
    Regime(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{scenario} requires {clause}")]
    Hypothesis { scenario: String, clause: String },

    #[error("config parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

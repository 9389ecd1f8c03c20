use thiserror::Error;

use crate::lagrange::ExponentReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid Jacobi exponents ({alpha}, {beta}): both must be finite and > -1")]
    InvalidExponents { alpha: f64, beta: f64 },

    #[error("degree {degree} out of range (system built to degree {max})")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("Gauss rule of order {m} failed to converge: {detail}")]
    NoConvergence { m: usize, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular matrix: zero pivot in column {column}")]
    Singular { column: usize },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("evaluation error in `{expr}`: {message}")]
    Eval { expr: String, message: String },

    #[error("modified moment c_{j}({y}) did not converge")]
    Moment { j: usize, y: f64 },

    #[error("quadrature tolerance {tol:e} not reached on [{a}, {b}] (estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, tol: f64, estimate: f64 },

    #[error("exponent constraints violated: {0}")]
    Validation(ExponentReport),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable category used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidExponents { .. } => "exponents",
            Error::DegreeOutOfRange { .. } | Error::IndexOutOfRange { .. } => "range",
            Error::NoConvergence { .. } => "convergence",
            Error::DimensionMismatch { .. } => "dimension",
            Error::Singular { .. } => "singular",
            Error::Syntax { .. } | Error::UnknownIdentifier { .. } => "syntax",
            Error::Eval { .. } => "eval",
            Error::Moment { .. } | Error::Quadrature { .. } => "quadrature",
            Error::Validation(_) => "validation",
            Error::Config(_) => "config",
            Error::InvalidInput(_) => "input",
        }
    }
}

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("initial stop value {z0} lies outside the constraint interval [{lower}, {upper}]")]
    InvalidInitialState { z0: f64, lower: f64, upper: f64 },

    #[error("non-finite numeric input: {context}")]
    NonFinite { context: String },

    #[error("operation requires a symmetric interval [-r, r], got [{lower}, {upper}]")]
    UnsupportedInterval { lower: f64, upper: f64 },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("invalid step size dt = {dt}")]
    InvalidStep { dt: f64 },

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("tridiagonal system is singular (zero pivot at row {row})")]
    SingularSystem { row: usize },

    #[error("index {index} out of range for grid with n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("expression evaluation failed: {0}")]
    Evaluation(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("configuration invalid:\n{}", .violations.join("\n"))]
    ConfigValidation { violations: Vec<String> },

    #[error("step failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("temperature positivity lost at node {node}: theta = {value} at t = {t}")]
    PositivityFailure { node: usize, value: f64, t: f64 },

    #[error("runs are not comparable: {0}")]
    Comparison(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

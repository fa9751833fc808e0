use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed network: dangling gain key, self-loop, bad weights.
    #[error("structural error at ({i}, {j}): {reason}")]
    Structural { i: usize, j: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid scalar function: {0}")]
    InvalidFunction(String),

    /// The scaling function violates its precondition at `t`.
    #[error("scaling error at t = {t}: {reason}")]
    Scaling { t: f64, reason: String },

    #[error("wrong operator class: {0}")]
    WrongClass(String),

    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NonConvergence { iterations: usize, last_step: f64 },

    #[error("state norm {norm:e} exceeded the divergence guard after {iterations} iterations")]
    Overflow { iterations: usize, norm: f64 },

    #[error("construction failed at r = {r}: {reason}")]
    Construction { r: f64, reason: String },

    #[error("index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("lyapunov assembly: {0}")]
    Assembly(String),

    /// The network parsed but failed its well-definedness checks.
    #[error("network validation failed: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use crate::assimilation::AssimilationReport;
use crate::navier::PicardReport;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Malformed input file; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Invalid configuration value. `line` is absent for missing keys.
    #[error("config error for key `{key}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("linear solve failed: {0}")]
    Singular(String),

    /// Picard iteration left the contraction regime; the report carries the
    /// iteration history up to the failure.
    #[error("picard iteration did not converge within {} iterations", report.iterations.len())]
    Divergence { report: PicardReport },

    /// Armijo backtracking exhausted its halvings.
    #[error("line search stagnated: {message}")]
    Stagnation {
        message: String,
        report: Box<AssimilationReport>,
    },

    #[error("measurement data mismatch: {0}")]
    DataMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

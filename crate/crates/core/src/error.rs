use thiserror::Error;

/// Errors raised by the kernel when inputs are structurally incompatible or a
/// constructor's hypotheses do not hold.
///
/// Mathematical check failures are never errors: they are recorded in a
/// [`CheckReport`](crate::report::CheckReport).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable lists differ: [{left}] vs [{right}]")]
    BaseMismatch { left: String, right: String },

    #[error("frame mismatch: expected {expected}, found {found}")]
    FrameMismatch { expected: String, found: String },

    #[error("index {index} out of range for {what} (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("degree error: {0}")]
    Degree(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("hypothesis `{law}` violated at {witness:?}: residual {residual}")]
    Hypothesis {
        law: String,
        witness: Vec<usize>,
        residual: String,
    },

    #[error("invalid input structure `{structure}`: {reason}")]
    InvalidStructure { structure: String, reason: String },

    #[error("metric is degenerate or has no polynomial inverse (determinant {0})")]
    DegenerateMetric(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

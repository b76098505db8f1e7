use thiserror::Error;

/// Errors shared across the solver library.
#[derive(Debug, Error)]
pub enum FhgError {
    /// Malformed instance input; carries a 1-based line number where known.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A precondition on types or arguments was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested method does not apply to this input.
    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),

    /// Instance exceeds a configured size cap (oracle n, vertex cover tau).
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    /// A tree decomposition failed validation.
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl FhgError {
    pub fn domain(msg: impl Into<String>) -> Self {
        FhgError::Domain(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        FhgError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, FhgError>;

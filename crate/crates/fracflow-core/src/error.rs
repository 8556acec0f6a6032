use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum FracflowError {
    /// A scalar argument left its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition on a grid or boundary failed.
    #[error("structural error: {0}")]
    Structure(String),

    /// A caller-supplied configuration value is invalid.
    #[error("config error: field `{field}`: {message}")]
    Config { field: String, message: String },

    /// An internal contract was violated (e.g. asymmetric inner samples).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A requested operation is not supported for the given input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Time stepping refused (CFL); carries the largest admissible step.
    #[error("time step {requested} exceeds stable limit; use dt <= {suggested}")]
    CflViolation { requested: f64, suggested: f64 },

    /// A run failed to reach its goal within the allowed horizon.
    #[error("run failed: {0}")]
    RunFailure(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A grid or config file did not parse.
    #[error("parse error: {0}")]
    Parse(String),
}

impl FracflowError {
    pub fn domain(msg: impl Into<String>) -> Self {
        FracflowError::Domain(msg.into())
    }
    pub fn structure(msg: impl Into<String>) -> Self {
        FracflowError::Structure(msg.into())
    }
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        FracflowError::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

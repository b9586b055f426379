use thiserror::Error;

/// Errors produced by network construction, tracking, simulation and I/O.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Invalid dimensions, parameter ranges or configuration files.
    #[error("configuration error: {0}")]
    Config(String),

    /// Bad input data (length mismatches, non-monotonic timestamps, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A file failed to parse; `line` is 1-based where known.
    #[error("parse error in {context}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Parse {
        context: String,
        line: Option<usize>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Activity is all zero or otherwise cannot be decoded.
    #[error("undecodable activity: {0}")]
    Undecodable(String),

    /// A commanded shift left the representable range.
    #[error("shift out of range: {0}")]
    OutOfRange(String),

    /// No route exists between the requested cells.
    #[error("unreachable: {0}")]
    Unreachable(String),

    /// A traversal exceeded its step budget.
    #[error("timeout: {0}")]
    Timeout(String),
}

impl CoreError {
    pub fn parse(context: impl Into<String>, line: Option<usize>, message: impl Into<String>) -> Self {
        CoreError::Parse {
            context: context.into(),
            line,
            message: message.into(),
        }
    }

    /// True for faults of the running network rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, CoreError::Undecodable(_) | CoreError::OutOfRange(_))
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;

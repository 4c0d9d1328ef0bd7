use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Inputs that disagree with each other (unknown sample, duplicate record, ...).
    #[error("inconsistent input: {0}")]
    Input(String),

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("taxonomy node `{0}` not found")]
    MissingNode(String),

    /// A statistic that cannot be computed from the given inputs.
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    /// Whether the error stems from user-supplied input rather than a fault
    /// inside the toolkit. The CLI maps this to its exit code.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Diverged(_) | Error::Json(_))
    }
}

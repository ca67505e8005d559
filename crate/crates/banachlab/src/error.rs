//! Error type shared by all modules.

/// Errors raised by norm computations and constructors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("unsupported space family for {op}: {detail}")]
    UnsupportedFamily { op: &'static str, detail: String },

    #[error("complex scalars not supported by {0}")]
    ComplexUnsupported(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidArgument(format!("serialization: {e}"))
    }
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn unsupported(op: &'static str, detail: impl Into<String>) -> Self {
        Error::UnsupportedFamily {
            op,
            detail: detail.into(),
        }
    }
}

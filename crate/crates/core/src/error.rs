use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad or missing configuration: unknown distribution, missing model, etc.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("world generation failed: {0}")]
    Generation(String),
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format { what, detail: detail.into() }
    }

    /// True for errors a user can fix by editing inputs (exit code 1).
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Format { .. })
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into two families, which the command-line driver maps to
/// distinct exit codes: input errors (bad arguments, malformed files) and
/// computation errors (numerical failures, resource caps).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(
        "filtration would contain more than {cap} simplices; \
         try a smaller threshold or a lower maximum dimension"
    )]
    TooManySimplices { cap: usize },

    #[error("kernel value at ({i}, {j}) is not finite")]
    NonFiniteKernel { i: usize, j: usize },

    #[error("training failed: {0}")]
    Training(String),

    #[error("computation failed: {0}")]
    Computation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// `true` for errors caused by the caller's input rather than by the
    /// computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_)
        )
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

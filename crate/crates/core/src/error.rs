use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    /// The collection does not have the number of colors an operation requires.
    #[error("shape mismatch: expected {expected} colors, found {found}")]
    Shape { expected: usize, found: usize },

    /// A documented precondition (hypothesis, compatibility, size bound) does not hold.
    #[error("precondition failed: {0}")]
    Contract(String),

    /// A search ran out of its node or time budget before deciding.
    #[error("budget exhausted: {0}")]
    Budget(String),

    /// A bound that must hold under the hypothesis failed. `bundle` carries a
    /// serialized reproduction when one is available.
    #[error("internal error: {message}")]
    Internal {
        message: String,
        bundle: Option<String>,
    },
}

impl Error {
    pub fn internal(message: impl Into<String>) -> Error {
        Error::Internal {
            message: message.into(),
            bundle: None,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

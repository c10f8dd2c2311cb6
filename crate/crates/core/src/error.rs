use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: wrong shape, dangling index, incomplete table.
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    /// Structurally well-formed data that violates a groupoid or functor law.
    #[error("law violation: {0}")]
    Invalid(String),

    #[error("search budget of {0} candidate steps exceeded")]
    BudgetExceeded(u64),

    #[error("boundary mismatch: {0}")]
    Mismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("polynomial is not finitary: fiber over {0} has a nontrivial automorphism")]
    NotFinitary(usize),

    #[error("polynomial is not linear: fiber over {base} has {classes} elements")]
    NotLinear { base: usize, classes: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

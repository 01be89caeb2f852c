use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter `{key}`: {message}")]
    InvalidParameter { key: String, message: String },

    /// A search whose enumeration size exceeds the allowed budget.
    #[error("search space of {size} configurations exceeds the budget of {budget}")]
    BudgetExceeded { size: u128, budget: u64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(key: &str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

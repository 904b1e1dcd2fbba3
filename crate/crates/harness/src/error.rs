use dyadic_core::DyadicError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("budget infeasible: {0}")]
    BudgetInfeasible(String),

    #[error(transparent)]
    Core(#[from] DyadicError),

    #[error("{0}")]
    Io(String),
}

impl HarnessError {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        HarnessError::Config {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        HarnessError::Io(format!("{}: {e}", path.display()))
    }
}

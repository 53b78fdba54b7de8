use thiserror::Error;

use crate::multiindex::MultiIndex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("multi-indices {0} and {1} overlap")]
    Overlap(MultiIndex, MultiIndex),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("budget exceeded: {what} needs {needed:.3e}, cap is {cap:.3e}")]
    Budget { what: &'static str, needed: f64, cap: f64 },
    #[error("size mismatch: {0}")]
    Size(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("state has zero norm")]
    ZeroState,
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument left its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs whose shapes or lengths do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Data that is constant, empty, or otherwise carries no information.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A label value or class is missing or out of range.
    #[error("label error: {0}")]
    Label(String),

    /// An iterative numeric routine failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Malformed tabular input; row and column are 1-based.
    #[error("parse error at row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

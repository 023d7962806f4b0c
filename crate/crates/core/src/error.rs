use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    /// A barrier of lower order is nonpositive, so a square root or the
    /// division by its square root is undefined at this state.
    #[error(
        "barrier of order {order} is {value}, outside the domain required for order {requested}"
    )]
    Domain {
        order: usize,
        value: f64,
        requested: usize,
    },

    #[error("validation failed: {0}")]
    Validation(ValidationReport),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{count} constraints exceed the enumeration cap of {cap}")]
    Size { count: usize, cap: usize },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

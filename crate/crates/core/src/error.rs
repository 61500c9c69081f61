use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{what} limit exceeded: {actual} > {limit}")]
    LimitExceeded {
        what: &'static str,
        limit: u128,
        actual: u128,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("host has no ordered edges; no distribution exists")]
    NoDistribution,

    #[error("internal consistency violated: {0}")]
    Internal(String),

    #[error("search budget of {budget} nodes exceeded; best bounds found: {lower} <= ex <= {upper}")]
    BudgetExceeded { budget: u64, lower: usize, upper: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn limit(what: &'static str, limit: impl Into<u128>, actual: impl Into<u128>) -> Error {
    Error::LimitExceeded {
        what,
        limit: limit.into(),
        actual: actual.into(),
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} refuses n = {n} (limit {max})")]
    TooLarge { what: &'static str, n: usize, max: usize },

    #[error("invalid LP model: {0}")]
    InvalidModel(String),

    #[error("LP unexpectedly {0}")]
    UnexpectedLpStatus(String),

    #[error("json: {0}")]
    Json(String),

    #[error("suite failure: {0}")]
    SuiteFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

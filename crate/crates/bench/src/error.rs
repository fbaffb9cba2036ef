use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    /// Bad command-line or API usage: unknown ids, empty method lists and
    /// the like. The message lists the valid choices where there are any.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] orbench_core::Error),
    #[error("report line {line}: {msg}")]
    Report { line: usize, msg: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

pub(crate) fn usage(msg: impl Into<String>) -> BenchError {
    BenchError::Usage(msg.into())
}

use orbench_lp::{LpError, LpStatus};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid action: {0}")]
    Domain(String),
    #[error("episode has finished; call reset before stepping again")]
    EpisodeDone,
    #[error("environment has not been reset")]
    NotReset,
    #[error("problem too large: {0}")]
    Size(String),
    #[error("placement failed: {0}")]
    Placement(String),
    #[error("policy produced an invalid action at step {step}: {source}")]
    InvalidAction {
        step: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("LP solve ended with status {status:?}\n{dump}")]
    LpFailed { status: LpStatus, dump: String },
    #[error(transparent)]
    LpInput(#[from] LpError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

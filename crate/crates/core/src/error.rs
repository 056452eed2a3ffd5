use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("sample contains no ratings")]
    EmptySample,

    #[error("validation error: {0}")]
    Validation(String),

    #[error("infeasible split: {0}")]
    InfeasibleSplit(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("landmarker infeasible for dataset `{dataset}`: {msg}")]
    LandmarkerInfeasible { dataset: String, msg: String },

    #[error("training error: {0}")]
    Training(String),

    #[error("evaluation undefined: {0}")]
    EvaluationUndefined(String),

    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error("invalid performance value: {0}")]
    InvalidPerformance(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn parse(line: u64, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(e) => Error::Io(e),
            kind => Error::Parse {
                line,
                msg: format!("{kind:?}"),
            },
        }
    }
}

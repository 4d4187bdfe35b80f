use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

use crate::types::RunRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluation budget of {max_evals} exhausted")]
    BudgetExhausted { max_evals: u64 },

    #[error("objective returned non-finite value {value} at {position:?}")]
    NonFiniteObjective { value: f64, position: Vec<f64> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid search space: {0}")]
    SearchSpace(String),

    #[error("operator needs {needed} distinct eagles but only {available} are available")]
    InsufficientPopulation { needed: usize, available: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("unknown benchmark function `{0}`")]
    UnknownFunction(String),

    #[error("benchmark `{function}` does not match its tabulated optimum: {detail}")]
    TranscriptionMismatch { function: String, detail: String },

    #[error("external objective protocol error: {0}")]
    Protocol(String),

    #[error("external objective did not answer within {0:?}")]
    Timeout(Duration),

    #[error("external objective process exited: {0}")]
    ChildExit(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    /// A run stopped on an error after doing some work; the partial record
    /// keeps the evaluations and trace up to the failure.
    #[error("run aborted after {} evaluations: {cause}", partial.evals_used)]
    Aborted {
        cause: Box<Error>,
        partial: Box<RunRecord>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// The underlying error, looking through [`Error::Aborted`].
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Aborted { cause, .. } => cause.root_cause(),
            other => other,
        }
    }

    pub fn partial_record(&self) -> Option<&RunRecord> {
        match self {
            Error::Aborted { partial, .. } => Some(partial),
            _ => None,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("weighted quadratic is singular for lambda {lambda:?} (min eigenvalue {min_eig:.3e})")]
    SingularScalarization { lambda: Vec<f64>, min_eig: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty input: {0}")]
    EmptyData(&'static str),
    #[error("group attribute is required but missing")]
    MissingGroup,
    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),
    #[error("cell at data row {row}, column `{column}` does not parse as a number: {value:?}")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("non-finite training loss at step {step}")]
    NonFiniteLoss { step: usize },
    #[error("ensemble closure failed at lambda {lambda:?}: {source}")]
    Ensemble {
        lambda: Vec<f64>,
        #[source]
        source: Box<Error>,
    },
    #[error("config error: {0}")]
    Config(String),
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
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

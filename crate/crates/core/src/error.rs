use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column `{0}` not found")]
    MissingColumn(String),

    #[error("line {line}: expected {expected} fields, found {found}")]
    Arity {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("column `{column}` is {found}, expected {expected}")]
    KindMismatch {
        column: String,
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("no values to bin")]
    EmptyValues,

    #[error("non-finite value {0} cannot be binned")]
    NonFinite(f64),

    #[error("invalid quantile probabilities: {0}")]
    InvalidProbs(String),

    #[error("invalid bin scheme for `{predictor}`: {reason}")]
    InvalidScheme { predictor: String, reason: String },

    #[error("category `{value}` of `{predictor}` is not in the bin scheme")]
    UnknownCategory { predictor: String, value: String },

    #[error("invalid fold count k={k} for {n} cases (need 2 <= k <= n)")]
    InvalidFolds { n: usize, k: usize },

    #[error("learner failed on fold {fold}: {message}")]
    Learner { fold: usize, message: String },

    #[error("predictions do not line up with the dataset: {0}")]
    Alignment(String),

    #[error("label `{0}` is not in the label universe")]
    UnknownLabel(String),

    #[error("invalid chi-squared input: {0}")]
    Chi2Input(String),

    #[error("invalid mining configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid query: {0}")]
    Query(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

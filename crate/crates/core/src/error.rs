use thiserror::Error;

use crate::sampler::SommOutput;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// The candidate budget ran out before the requested number of synthetic
    /// instances was retained. Carries whatever was produced.
    #[error("attempt cap of {cap} candidates reached with {} of {requested} synthetic instances", partial.synthetic.nrows())]
    AttemptCap {
        cap: usize,
        requested: usize,
        partial: Box<SommOutput>,
    },

    #[error("class {class}: {source}")]
    Class {
        class: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True when this error (or the error it wraps) is an attempt-cap abort.
    pub fn is_attempt_cap(&self) -> bool {
        match self {
            Error::AttemptCap { .. } => true,
            Error::Class { source, .. } => source.is_attempt_cap(),
            _ => false,
        }
    }
}

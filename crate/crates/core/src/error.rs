use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A record in an input file could not be parsed or failed validation.
    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("missing field `{field}` in {path}")]
    MissingField { path: String, field: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Two count tables with incompatible parameters or labels were combined.
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    /// A statistical precondition was violated (zero-size corpus, empty
    /// contingency, misaligned series, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A statistic is undefined for the given data (e.g. zero variance).
    #[error("undefined statistic: {0}")]
    Degenerate(String),

    #[error("tagger model: {0}")]
    Model(String),

    #[error("affect lexicon: {0}")]
    Lexicon(String),

    /// Wraps an error with the pipeline stage it occurred in and, when
    /// known, the offending record id.
    #[error("stage `{stage}`{}: {source}", fmt_record(.record))]
    Stage {
        stage: &'static str,
        record: Option<String>,
        #[source]
        source: Box<Error>,
    },
}

fn fmt_record(record: &Option<String>) -> String {
    record
        .as_deref()
        .map(|r| format!(" (record {r})"))
        .unwrap_or_default()
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(path: impl Into<String>, line: usize, reason: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }

    pub fn in_stage(self, stage: &'static str, record: Option<String>) -> Self {
        Error::Stage {
            stage,
            record,
            source: Box::new(self),
        }
    }

    /// True for errors caused by the input data rather than by usage or bugs.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Io { .. }
            | Error::Malformed { .. }
            | Error::MissingField { .. }
            | Error::ParamMismatch(_)
            | Error::Model(_)
            | Error::Lexicon(_)
            | Error::Degenerate(_) => true,
            Error::Stage { source, .. } => source.is_data_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

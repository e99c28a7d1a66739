use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty document: {doc_id}")]
    EmptyDocument { doc_id: String },

    #[error("paragraph too short: {sentences} sentence(s), need at least {needed}")]
    ParagraphTooShort { sentences: usize, needed: usize },

    #[error("no foreign document available (excluding {exclude})")]
    NoForeignDocument { exclude: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("missing context for contextual encoding of question {question_id}")]
    MissingContext { question_id: String },

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: schema mismatch: expected {expected:?}, found {found:?}")]
    SchemaMismatch {
        path: PathBuf,
        expected: &'static str,
        found: String,
    },

    #[error("empty corpus after filtering")]
    EmptyCorpus,

    #[error("no questions to evaluate")]
    NoQuestions,

    #[error("question {question_id} has no positive candidate")]
    NoPositive { question_id: String },

    #[error("baseline mismatch: {0}")]
    BaselineMismatch(String),

    #[error("unknown document {doc_id} referenced by {question_id}")]
    UnknownDocument { question_id: String, doc_id: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, line: usize, message: impl ToString) -> Self {
        Error::Malformed {
            path: path.into(),
            line,
            message: message.to_string(),
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parent count {0}: at least 2 parents are required")]
    InvalidParentCount(usize),

    #[error("unsupported size {got}: maximum is {max}")]
    UnsupportedSize { got: usize, max: usize },

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite fitness {value} for genome {genome}")]
    Evaluation { value: f64, genome: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("incomplete design, missing cells: {}", .0.join(", "))]
    IncompleteDesign(Vec<String>),

    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("JSON error on {}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn arity(msg: impl Into<String>) -> Self {
        Error::Arity(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

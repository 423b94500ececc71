use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by corpus ingestion, model (de)serialization, training
/// and encoding.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    Decode { path: PathBuf, offset: usize },

    #[error("model parse error at line {line}: {message}")]
    ModelParse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("token id {0} out of range")]
    TokenIdRange(u32),

    #[error("vocabulary has no {0} token")]
    MissingSpecial(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::ModelParse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

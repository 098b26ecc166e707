use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("duplicate term id {llt_id} at line {line}")]
    DuplicateTerm { llt_id: String, line: u64 },

    #[error("line {line}: pseudo term {pseudo_text:?} targets unknown term id {target}")]
    UnknownTarget {
        line: u64,
        pseudo_text: String,
        target: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("term id {0} is not in the terminology")]
    UnknownTerm(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context} at line {line}: {message}")]
    Parse {
        context: String,
        line: usize,
        message: String,
    },

    #[error("ontology error: {0}")]
    Ontology(String),

    #[error("invalid triple {triple}: {reason}")]
    InvalidTriple { triple: String, reason: String },

    #[error("invalid frame {frame}: {reason}")]
    InvalidFrame { frame: String, reason: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("bad cell at row {row}, column `{column}`: {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("rule error at line {line}: {message}")]
    Rule { line: usize, message: String },

    #[error("unknown entity `{0}`")]
    UnknownEntity(String),

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("cannot produce {requested} distinct corruptions, only {available} candidates exist")]
    CorruptionPool { requested: usize, available: usize },

    #[error("training error: {0}")]
    Training(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("backend error after {attempts} attempt(s): {message}")]
    Backend { attempts: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

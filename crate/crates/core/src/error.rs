use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter is out of range.
    #[error("configuration error: {0}")]
    Config(String),

    /// Configuration document could not be parsed.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// A configuration key is unknown or violates a constraint.
    #[error("{key}: {message}")]
    Semantic { key: String, message: String },

    #[error("degenerate mode at k = {k}, h = {h}: gap below 1e-14")]
    Degenerate { k: f64, h: f64 },

    #[error("integration failed for k = {k} at t = {t}: {reason}")]
    Integration { k: f64, t: f64, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    /// Input outside the domain where a closed form is valid.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed table: {message}", path.display())]
    Table { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn semantic(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Semantic {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end: 1 for anything
    /// caused by the input configuration, 2 for numerical or runtime failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Syntax { .. } | Error::Semantic { .. } => 1,
            _ => 2,
        }
    }
}

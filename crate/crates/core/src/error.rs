use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A length did not match what the topology or decoder requires.
    #[error("size mismatch: expected {expected}, got {got}")]
    Size { expected: usize, got: usize },

    #[error("invalid topology: {0}")]
    Topology(String),

    /// A fanal pattern still holds erased clusters where a full pattern is required.
    #[error("pattern has {0} erased cluster(s)")]
    Erased(usize),

    #[error("value out of range: {0}")]
    Range(String),

    /// A formula was evaluated outside of its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A circuit precondition (e.g. the max-selector nonnegativity rule) was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Text input could not be parsed. `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A binary snapshot or config file is malformed.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn size(expected: usize, got: usize) -> Self {
        Error::Size { expected, got }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by malformed input data, as opposed to I/O or
    /// usage problems.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Size { .. }
                | Error::Erased(_)
                | Error::Range(_)
                | Error::Parse { .. }
                | Error::Format(_)
                | Error::Csv(_)
        )
    }
}

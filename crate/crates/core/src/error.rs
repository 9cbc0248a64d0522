use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error("empty span [{start}, {end})")]
    Empty { start: usize, end: usize },
    #[error("span [{start}, {end}) exceeds document length {len}")]
    OutOfBounds { start: usize, end: usize, len: usize },
}

/// A resource or record file that failed to parse. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("cannot read a date from {0:?}")]
    Date(String),
    #[error("cannot read an amount of money from {0:?}")]
    Money(String),
    #[error("cannot read a time from {0:?}")]
    Time(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {error}")]
    Io { path: PathBuf, error: std::io::Error },
    #[error("{path}: {error}")]
    Parse { path: PathBuf, error: ParseError },
    #[error("config: {0}")]
    Config(String),
    #[error("inconsistent records: {0}")]
    Consistency(String),
}

impl Error {
    pub fn parse(path: impl Into<PathBuf>, error: ParseError) -> Self {
        Error::Parse { path: path.into(), error }
    }
}

use thiserror::Error;

/// Errors raised while ingesting or processing data.
///
/// Line numbers are 1-based and refer to the JSONL input line that
/// triggered the failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: parse error: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: schema error: {message}")]
    Schema { line: usize, message: String },

    #[error("line {line}: ordering error: {message}")]
    Ordering { line: usize, message: String },

    #[error("line {line}: value error: {message}")]
    Value { line: usize, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Coarse classification used by the command-line exit code contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or unreadable input (exit code 2).
    Format,
    /// Well-formed input that violates a data invariant (exit code 1).
    Validation,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) | Error::Parse { .. } | Error::Schema { .. } => ErrorClass::Format,
            Error::Ordering { .. }
            | Error::Value { .. }
            | Error::Input(_)
            | Error::Contract(_)
            | Error::Config(_) => ErrorClass::Validation,
        }
    }

    /// Short machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Parse { .. } => "parse",
            Error::Schema { .. } => "schema",
            Error::Ordering { .. } => "ordering",
            Error::Value { .. } => "value",
            Error::Input(_) => "input",
            Error::Contract(_) => "contract",
            Error::Config(_) => "config",
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn schema(line: usize, message: impl Into<String>) -> Self {
        Error::Schema { line, message: message.into() }
    }

    pub(crate) fn ordering(line: usize, message: impl Into<String>) -> Self {
        Error::Ordering { line, message: message.into() }
    }

    pub(crate) fn value(line: usize, message: impl Into<String>) -> Self {
        Error::Value { line, message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

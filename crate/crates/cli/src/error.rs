use std::fmt;

use hetcdc_core::Error;

/// Process exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Domain = 1,
    Parse = 2,
    Inconsistent = 3,
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed input: bad JSON, bad numbers, unreadable config.
    Parse(String),
    /// Well-formed input outside the model's domain.
    Domain(Error),
    /// Output could not be written.
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Parse(_) | CliError::Domain(Error::Parse(_)) => ExitCode::Parse,
            CliError::Domain(_) | CliError::Io(_) => ExitCode::Domain,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "parse error: {msg}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

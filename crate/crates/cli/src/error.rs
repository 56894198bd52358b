use thiserror::Error;

/// Failures surfaced by the command line, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or physically invalid parameters. Exit code 2.
    #[error("invalid argument: {0}")]
    Invalid(String),
    /// A numerical route failed on valid input. Exit code 3.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<lossfish_core::Error> for CliError {
    fn from(e: lossfish_core::Error) -> Self {
        use lossfish_core::Error::*;
        match e {
            SingularSystem { .. } | DegenerateDenominator | DivisionByZero => CliError::Numerical(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;

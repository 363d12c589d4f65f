//! Error-to-exit-code mapping.
//!
//! Exit codes: 0 success, 2 configuration error, 3 resource bound or data
//! starvation, 4 invariant failure.

use sawlab_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file, or operation preconditions.
    Config(String),
    /// An enforced enumeration or sampling bound, or starved conditioning.
    Resource(String),
    /// A checked identity or inequality failed.
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Resource(m) | CliError::Invariant(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::ResourceBound { .. } | CoreError::ConditioningStarved(_) => {
                CliError::Resource(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o failure: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

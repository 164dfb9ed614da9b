use std::fmt;

use mfdfa::{GenerateError, IngestError, MfdfaError, RollError};

/// Input or validation problem.
pub const EXIT_INPUT: i32 = 1;
/// The numerics failed on valid input.
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<MfdfaError> for CliError {
    fn from(e: MfdfaError) -> Self {
        let code = if e.is_numerical() {
            EXIT_NUMERICAL
        } else {
            EXIT_INPUT
        };
        Self {
            code,
            message: format!("{}: {e}", e.name()),
        }
    }
}

impl From<RollError> for CliError {
    fn from(e: RollError) -> Self {
        match e {
            RollError::Config(inner) => inner.into(),
            other => Self::input(other.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<GenerateError> for CliError {
    fn from(e: GenerateError) -> Self {
        let code = match e {
            GenerateError::InvalidParameter(_) => EXIT_INPUT,
            GenerateError::EmbeddingFailure { .. } => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::input(e.to_string())
    }
}

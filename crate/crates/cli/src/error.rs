use std::fmt;

use ips_zeta::Error;

pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self { code: EXIT_RUNTIME, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConstraintViolation { .. }
            | Error::DomainError(_)
            | Error::DimensionMismatch { .. }
            | Error::SizeExceeded { .. }
            | Error::KindMismatch(_)
            | Error::Parse(_)
            | Error::SingularAtU { .. } => EXIT_INVALID,
            Error::ConvergenceFailure { .. } | Error::InvariantDrift { .. } => EXIT_RUNTIME,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::runtime(e.to_string())
    }
}

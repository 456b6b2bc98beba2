use std::fmt;
use unipulse::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable, malformed or out-of-range configuration.
    Config(String),
    /// The simulation itself failed.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Numeric(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite(_)
            | Error::InvalidParameter { .. }
            | Error::DimensionMismatch { .. }
            | Error::UnsupportedDimension(_)
            | Error::InvalidState(_)
            | Error::InvalidDensity(_)
            | Error::InvalidSchedule(_)
            | Error::StepTooLarge { .. }
            | Error::Cfl { .. }
            | Error::UnknownAxis(_)
            | Error::MissingParameter(_) => CliError::Config(e.to_string()),
            Error::NotHermitian(_) | Error::NotUnitary(_) | Error::Stalled { .. } | Error::NonConvergent { .. } => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::from(Error::Cfl { dt: 1.0, limit: 0.5 }).exit_code(), 2);
        assert_eq!(CliError::from(Error::Stalled { position: 1.0, length: 2.0, time: 3.0 }).exit_code(), 3);
        assert_eq!(CliError::from(Error::MissingParameter("delta".into())).exit_code(), 2);
    }
}

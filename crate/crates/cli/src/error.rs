use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI command, each tied to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Invariant(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Assertion(_) => 5,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Errors raised while turning a parsed scenario into domain objects or
/// evaluating it. Specification mistakes count as parse errors; failed
/// physical invariants as invariant violations.
pub(crate) fn from_core(path: &str, err: symcond::Error) -> CliError {
    use symcond::Error as E;
    match err {
        E::InvalidSpec(message) => CliError::Parse {
            path: path.to_string(),
            message,
        },
        E::UnknownOutcome(label) => CliError::Parse {
            path: path.to_string(),
            message: format!("unknown outcome label {label:?}"),
        },
        other => CliError::Invariant(other.to_string()),
    }
}

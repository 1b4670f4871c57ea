use thiserror::Error;

use crate::linalg::LinalgError;
use crate::quantum::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Invalid(#[from] Violation),
    #[error("unknown outcome label {0:?}")]
    UnknownOutcome(String),
    #[error("outcome {outcome:?} has probability {probability:.3e}, at or below the floor {floor:.1e}")]
    ZeroProbabilityOutcome {
        outcome: String,
        probability: f64,
        floor: f64,
    },
    #[error("precondition {name} fails: residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    HypothesisViolated { name: String, residual: f64, tol: f64 },
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
}

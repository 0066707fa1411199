//! Algebraic curves `F(u, u') = 0`: genus and closed-form integration.

use thiserror::Error;

pub mod ansatz;
pub mod closed;
pub mod genus;
pub mod integrate;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("not a plane curve: {0}")]
    NotACurve(String),
    #[error("curve is reducible")]
    NotIrreducible,
    #[error("singular point with irrational coordinates: {0}")]
    IrrationalSingularLocus(String),
    #[error("unsupported singularity: {0}")]
    UnsupportedSingularity(String),
    #[error("no closed form: {reason}")]
    NoClosedForm { reason: String, system: Vec<String> },
}

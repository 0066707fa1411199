//! Exact Laurent-series analysis and Briot-Bouquet subequation synthesis for
//! autonomous algebraic ODEs, with closed-form integration and verification.

pub mod arith;
pub mod curve;
pub mod ode;
pub mod pipeline;
pub mod singular;
pub mod subeq;
pub mod verify;

/// Crate version, recorded in report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

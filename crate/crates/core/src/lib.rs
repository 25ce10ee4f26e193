//! Target-zone exchange rates under uncovered interest parity.
//!
//! A managed FX rate `S = f(X)` is driven by a diffusion `X` reflected at `±L`.
//! Requiring UIRP with a rate differential tied to `S` turns the peg scale into
//! the first excited level of a Schrodinger-type operator; the rest of the crate
//! builds the FX map from it, then simulates paths and prices claims.

pub mod eigen;
pub mod error;
pub mod fxmap;
pub mod model;
pub mod numeric;
pub mod pricing;
pub mod sim;

pub use error::{Error, Result};
pub use model::{Direction, DriftSpec, PegKind, PegSpec, ProcessParams, RateEnv, Side, TabulatedDrift, TargetZone};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Band geometry and drift catalog, plus pegs and process settings.

mod drift;
mod peg;
mod process;
mod zone;

pub use drift::{drift_eval, potential_eval, DeltaTerm, Direction, DriftSpec, PotentialValue, Side, TabulatedDrift};
pub use peg::{rho_eval, PegKind, PegSpec, RateEnv};
pub use process::ProcessParams;
pub use zone::{validate_zone, TargetZone, GAMMA_LIMIT};

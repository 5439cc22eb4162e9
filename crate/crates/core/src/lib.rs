//! Entanglement, discord and Bell-nonlocality measures for three-qubit states.

pub mod bell;
pub mod complementarity;
pub mod discord;
pub mod entanglement;
pub mod error;
pub mod qmath;
pub mod rng;
pub mod states;
pub mod sweep;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use qmath::{ComplexMatrix, Party, Subsystem, C64};
pub use rng::RngSeed;
pub use states::{FamilyParams, GhzParams, PureState3, WParams};

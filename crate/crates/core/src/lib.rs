//! Construction and verification of the invariant Hermitian form for the
//! Mellin-Barnes monodromy of a non-resonant A-hypergeometric system.
//!
//! The pipeline runs from the Gale dual `B` and parameter vector `gamma0`
//! through the secondary-fan geometry (cotriangles, cotriangulations,
//! chambers), solution points, transition matrices and monodromy generators,
//! to the Hermitian form itself, with residue-based invariance checks and a
//! signature comparison.

pub mod error;
pub mod fan;
pub mod herm;
pub mod ratlin;
pub mod resid;
pub mod solpts;

pub use error::{Error, Result};

//! Monte Carlo simulation of GKP-encoded rotated surface codes with
//! measurement-based two-mode gates.
//!
//! Each bosonic mode is tracked as a pair of quadrature shifts. Gates add
//! output-referred Gaussian noise, teleportation through qunaught Bell pairs
//! snaps shifts back to the √π lattice, and the residual of that rounding
//! weights a space-time matching graph decoded by minimum-weight perfect
//! matching.

pub mod correction;
pub mod decoder;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod noise;
pub mod symplectic;

pub use error::{Error, Result};

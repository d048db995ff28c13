//! Two-phase Navier-Stokes-Cahn-Hilliard solver with chemotaxis coupling,
//! mass-transfer source terms, and per-step energy/mass auditing.
//!
//! The crate is organized along the physics:
//! - [`params`]: physical constants, the double-well potential, the chemical
//!   free energy, coefficient profiles, and structural validation.
//! - [`grid`] / [`ops`]: staggered grid, fields, and discrete operators.
//! - [`ch`], [`nutrient`], [`ns`]: the three implicit sub-steps.
//! - [`sources`]: mass-transfer and reaction presets.
//! - [`diagnostics`]: energy identity, mass balances, solver health.
//! - [`verification`]: independent oracles and convergence studies.
//! - [`config`], [`sim`], [`output`]: the run driver.

pub mod ch;
// pub mod config;
// pub mod diagnostics;
pub mod error;
pub mod grid;
// pub mod initial;
pub mod linsolve;
pub mod ns;
pub mod nutrient;
pub mod ops;
// pub mod output;
pub mod params;
// pub mod sim;
// pub mod sources;
pub mod spectral;
pub mod threads;
pub mod transforms;
// pub mod verification;

pub use error::NschError;
pub use grid::{BcKind, Grid2D, MacVelocity, ScalarField};
pub use params::{CoeffSpec, ModelParams, PotentialSpec};

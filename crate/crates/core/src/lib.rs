//! Simulation and verification of spatial decay estimates for the
//! backward-in-time problem of porous thermoelastic bodies with voids.
//!
//! The crate is organized bottom-up: [`material`] holds coefficients and
//! their spectra, [`constitutive`] the pointwise response and inequalities,
//! [`solver`] the explicit integrator for the time-reflected forward problem,
//! [`measures`] the time-weighted energy measure and its certificates, and
//! [`cli`] the command-line pipeline.

pub mod cli;
pub mod constitutive;
pub mod linalg;
pub mod material;
pub mod measures;
pub mod sampling;
pub mod solver;
pub mod suite;
pub mod tolerance;

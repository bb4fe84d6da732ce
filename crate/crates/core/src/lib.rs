//! Steady-state cavity optomechanics with a trapped atomic ensemble.
//!
//! An ensemble of atoms held in the wells of an intracavity optical lattice
//! acts as a compressible mechanical element, a gaseous cantilever. Its
//! position along the probe standing wave sets the balance between linear
//! and quadratic optomechanical coupling. This crate computes:
//!
//! * the dispersive cavity shift produced by the ensemble ([`coupling`],
//!   [`ensemble`]),
//! * the mechanical response of the ensemble to the probe potential
//!   ([`mechanics`]),
//! * self-consistent cavity/cantilever steady states, bistability and
//!   swept-probe hysteresis ([`steady_state`]),
//! * frequency-shift observables ([`spectra`]).
//!
//! All frequencies inside the library are angular (rad/s). Hz only appears
//! at the config and CSV boundaries.

// Validation is written as `!(x > 0.0)` so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod constants;
pub mod coupling;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod fit;
pub mod mechanics;
pub mod params;
pub mod spectra;
pub mod steady_state;

pub use error::{Error, Result};
pub use exec::Exec;
pub use params::{default_rb87_params, EnsembleConfig, PhysicalParams, ProbeDrive, System};

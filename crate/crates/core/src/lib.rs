//! Orbital-angular-momentum interference of matter waves confined to a ring.
//!
//! Free evolution on a ring revives a localized packet after
//! `T_rev = 2πmR²/ħ`, acts as a π-rotation at `T_rev` and as a balanced beam
//! splitter at `T_rev/2`. This crate simulates the resulting interferometer:
//! exact spectral propagation (with gauge flux), perturbative torus-trap
//! corrections to the dispersion, split-step mean-field propagation for
//! interacting condensates, the full imprint-and-readout protocol and the
//! closed-form sensing estimates.

pub mod cli;
pub mod config;
pub mod constants;
pub mod error;
pub mod observables;
pub mod propagator;
pub mod protocol;
pub mod sensing;
pub mod spectrum;
pub mod state;

pub use error::{Error, Result};

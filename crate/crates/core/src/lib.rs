//! Pumped, dissipative Su-Schrieffer-Heeger chain built from an optical
//! lattice: hopping amplitudes, spectra and edge states, driven quench
//! dynamics, occupation observables and free-fermion entanglement.
//!
//! Energies are in units of the pump frequency; public time arguments are in
//! pump periods. Site and state indices are 0-based in the library and
//! 1-based in every file the CLI writes.

pub mod cli;
pub mod dynamics;
pub mod eigensolver;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod observables;

pub use error::{Error, Result};

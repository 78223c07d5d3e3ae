//! Simulation of vacuum-fluctuation-induced entanglement between two
//! collective-spin ensembles coupled to a single cavity mode, beyond the
//! rotating-wave approximation.
//!
//! The crate provides:
//! - a continuous-variable Gaussian-state core ([`symplectic`]),
//! - the harmonic (Holstein-Primakoff) model of the coupled system
//!   ([`model`]) and its exact symplectic time evolution ([`dynamics`]),
//! - logarithmic negativity of the reduced two-ensemble state
//!   ([`entanglement`]),
//! - a brute-force small-ensemble oracle with no harmonic approximation
//!   ([`oracle`]),
//! - a simulated balanced-homodyne readout that reconstructs the two-mode
//!   covariance matrix from sampled quadratures ([`readout`]).
//!
//! All frequencies are expressed in units of the Rabi coupling g and times
//! in units of 1/g (hbar = 1).

pub mod dynamics;
pub mod entanglement;
pub mod error;
mod expm;
pub mod model;
pub mod oracle;
pub mod readout;
pub mod symplectic;

pub use error::{Error, Result};

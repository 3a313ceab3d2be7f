//! Simulation and analysis of single-photon Franson interferometry over
//! long free-space channels.
//!
//! Phases are in radians, lengths in metres, times in seconds and
//! temperatures in kelvin unless a name says otherwise.

pub mod budget;
pub mod calibration;
pub mod channel;
pub mod constants;
pub mod detection;
mod error;
pub mod formats;
pub mod gravity;
mod lstsq;
pub mod rng;
pub mod series;
pub mod state;
pub mod units;

pub use error::{Error, Result};

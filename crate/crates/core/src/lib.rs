//! Steady-state resonance fluorescence of a driven two-level atom coupled to a
//! photonic band-edge reservoir, with a flat (Markovian) reservoir for
//! comparison.
//!
//! Frequencies are measured from the atomic transition unless noted. Results
//! carry a [`params::FrequencyUnit`]; [`params::normalize`] rescales a
//! parameter set so that `beta = 1` (band edge) or `gamma = 1` (free space).

pub mod bloch;
pub mod error;
pub mod first_order;
pub mod oracle;
pub mod kernels;
pub mod params;
pub mod spectrum;

pub use error::{Error, Result};
pub use params::{normalize, PhysicalParams, Reservoir};

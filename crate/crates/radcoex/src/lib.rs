//! Interference at a radar from a Poisson field of 3D-beamforming base
//! stations: average interference under circumcircle and area-equivalent
//! cell models, the dominant-interferer distribution, spatial detection
//! metrics, and a Monte Carlo engine that checks each of them.

pub mod antenna;
pub mod avgint;
pub mod detection;
pub mod error;
pub mod intdist;
pub mod quad;
pub mod simkit;
pub mod special;
pub mod stochgeom;

pub use antenna::{ArrayConfig, Pointing};
pub use error::{Error, Result};
pub use stochgeom::Deployment;

/// Watts to dBm.
pub fn dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

//! Half-wavelength uniform rectangular arrays.
//!
//! Elevation follows the convention where negative angles point above the
//! horizon. All gains are linear.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Result};

const SINGULAR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayConfig {
    pub n_az: usize,
    pub n_el: usize,
}

impl ArrayConfig {
    pub fn new(n_az: usize, n_el: usize) -> Result<Self> {
        if n_az == 0 || n_el == 0 {
            return invalid(format!("array dimensions must be positive, got {n_az}x{n_el}"));
        }
        Ok(Self { n_az, n_el })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn elements(&self) -> usize {
        self.n_az * self.n_el
    }
}

/// Azimuth and elevation in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pointing {
    pub azimuth: f64,
    pub elevation: f64,
}

impl Pointing {
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        if !azimuth.is_finite() || !elevation.is_finite() {
            return invalid("pointing angles must be finite");
        }
        if elevation.abs() > FRAC_PI_2 + 1e-12 {
            return invalid(format!("elevation {elevation} outside [-pi/2, pi/2]"));
        }
        Ok(Self { azimuth, elevation })
    }

    pub fn degrees(azimuth: f64, elevation: f64) -> Result<Self> {
        Self::new(azimuth.to_radians(), elevation.to_radians())
    }

    /// Direction cosine along the azimuth axis of the array.
    fn u(&self) -> f64 {
        self.azimuth.sin() * self.elevation.cos()
    }

    /// Direction cosine along the elevation axis of the array.
    fn v(&self) -> f64 {
        self.elevation.sin()
    }
}

pub fn steering_vector(array: ArrayConfig, p: Pointing) -> Vec<Complex64> {
    let (u, v) = (p.u(), p.v());
    let mut out = Vec::with_capacity(array.elements());
    for m in 0..array.n_az {
        for n in 0..array.n_el {
            let phase = -PI * (m as f64 * u + n as f64 * v);
            out.push(Complex64::from_polar(1.0, phase));
        }
    }
    out
}

/// Squared Dirichlet kernel sin^2(pi/2 N d) / (N sin^2(pi/2 d)), peak value N.
pub fn dirichlet_gain(n: usize, delta: f64) -> f64 {
    let nf = n as f64;
    let den = (FRAC_PI_2 * delta).sin();
    if den.abs() < SINGULAR {
        return nf;
    }
    let num = (FRAC_PI_2 * nf * delta).sin();
    num * num / (nf * den * den)
}

/// Signed kernel sin(pi/2 N d) / (N sin(pi/2 d)).
pub fn dirichlet_ratio(n: usize, delta: f64) -> f64 {
    let nf = n as f64;
    let x = FRAC_PI_2 * delta;
    let den = x.sin();
    if den.abs() < SINGULAR {
        // l'Hopital: cos(N x) / cos(x), which is +-1 at multiples of pi
        return (nf * x).cos() / x.cos();
    }
    (nf * x).sin() / (nf * den)
}

/// Gain |a(rx)^H a(steer)|^2 / M of a unit-norm steered array.
pub fn bf_gain(array: ArrayConfig, rx: Pointing, steer: Pointing) -> f64 {
    dirichlet_gain(array.n_az, rx.u() - steer.u()) * dirichlet_gain(array.n_el, rx.v() - steer.v())
}

/// Receive gain of the radar steered at `steer` for a wave arriving from `arrival`.
pub fn radar_gain(array: ArrayConfig, steer: Pointing, arrival: Pointing) -> f64 {
    bf_gain(array, arrival, steer)
}

/// Elevation-only factor of the radar gain for an arrival on the horizon.
pub fn horizon_elevation_gain(array: ArrayConfig, steer: Pointing) -> f64 {
    dirichlet_gain(array.n_el, -steer.elevation.sin())
}

/// Upper bound on the BS gain towards elevation `phi` over all beams steered
/// at elevations of at least `phi_m`. Nonincreasing in `phi_m`.
///
/// Valid for `phi >= 0`; for strongly negative `phi` the elevation offset can
/// exceed one and the grating lobe is not covered.
pub fn bf_gain_max(array: ArrayConfig, phi: f64, phi_m: f64) -> f64 {
    let naz = array.n_az as f64;
    let nel = array.n_el as f64;
    if phi_m <= phi {
        return naz * nel;
    }
    let d = phi_m.sin() - phi.sin();
    if d <= 1.0 / nel {
        naz * dirichlet_gain(array.n_el, d)
    } else {
        let s = (FRAC_PI_2 * d).sin();
        naz / (nel * s * s)
    }
}

/// Signed azimuth kernel of the radar for a BS on the horizon at azimuth `theta`.
pub fn azimuth_gain_ratio(n_az: usize, steer: Pointing, theta: f64) -> f64 {
    dirichlet_ratio(n_az, steer.u() - theta.sin())
}

/// Azimuth where the radar main lobe crosses the horizon.
pub fn main_lobe_azimuth(steer: Pointing) -> f64 {
    steer.u().clamp(-1.0, 1.0).asin()
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

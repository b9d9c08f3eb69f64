//! Campbell averages of the worst-case interference under the circumcircle
//! (CBC) and area-equivalent circular cell (AAECC) models.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::antenna::{bf_gain_max, radar_gain, Pointing};
use crate::error::{invalid, Result};
use crate::quad::{self, Integral};
use crate::stochgeom::{circumradius_pdf, circumradius_upper, Deployment};

const REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellModel {
    Cbc,
    CbcApprox,
    Aaecc,
    AaeccApprox,
}

impl fmt::Display for CellModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellModel::Cbc => "CBC",
            CellModel::CbcApprox => "CBC_APPROX",
            CellModel::Aaecc => "AAECC",
            CellModel::AaeccApprox => "AAECC_APPROX",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceSummary {
    pub mean_w: f64,
    /// Zero when the model defines no spread (CBC variants).
    pub std_w: f64,
    pub std_defined: bool,
    pub model: CellModel,
    pub quadrature_error: f64,
    pub warning: Option<String>,
}

/// Gauss rule over the radar half-plane theta in [-pi/2, pi/2] with
/// breakpoints at the horizon nulls and main lobe of the radar azimuth kernel.
pub fn azimuth_rule(dep: &Deployment, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let n = dep.rad_array.n_az as f64;
    let u0 = dep.rad_point.azimuth.sin() * dep.rad_point.elevation.cos();
    let mut cuts = vec![u0.clamp(-1.0, 1.0).asin()];
    let m_max = (n + 1.0) as i64;
    for m in -m_max..=m_max {
        let s = u0 - 2.0 * m as f64 / n;
        if s > -1.0 && s < 1.0 {
            cuts.push(s.asin());
        }
    }
    let br = quad::breakpoints(-FRAC_PI_2, FRAC_PI_2, cuts);
    quad::composite(&br, panels)
}

struct AzimuthGains {
    theta: Vec<f64>,
    w: Vec<f64>,
}

impl AzimuthGains {
    fn new(dep: &Deployment) -> Self {
        let (theta, w) = azimuth_rule(dep, 2);
        Self { theta, w }
    }

    /// Sum over theta of G_rad^power for a BS at ground distance r.
    fn at(&self, dep: &Deployment, r: f64, power: i32) -> f64 {
        let el = -(dep.dh() / r).atan();
        self.theta
            .iter()
            .zip(&self.w)
            .map(|(&t, &w)| {
                let g = radar_gain(dep.rad_array, dep.rad_point, Pointing { azimuth: t, elevation: el });
                w * g.powi(power)
            })
            .sum()
    }

    /// Same sum with the BS on the horizon.
    fn horizon(&self, dep: &Deployment, power: i32) -> f64 {
        self.theta
            .iter()
            .zip(&self.w)
            .map(|(&t, &w)| {
                let g = radar_gain(dep.rad_array, dep.rad_point, Pointing { azimuth: t, elevation: 0.0 });
                w * g.powi(power)
            })
            .sum()
    }
}

/// Integral of g over r in [r_exc, inf) via u = a / r on the tail.
fn radial<F: Fn(f64) -> f64>(dep: &Deployment, g: F) -> Result<Integral> {
    let scale = 10.0 * dep.h_bs.max(dep.h_rad).max(1.0);
    let (near, a) = if dep.r_exc > 0.0 {
        (Integral { value: 0.0, error: 0.0 }, dep.r_exc)
    } else {
        (quad::integrate(&g, 0.0, scale, REL_TOL, 0.0)?, scale)
    };
    let tail = quad::integrate(|u| if u <= 0.0 { 0.0 } else { g(a / u) * a / (u * u) }, 0.0, 1.0, REL_TOL, 0.0)?;
    Ok(Integral {
        value: near.value + tail.value,
        error: near.error + tail.error,
    })
}

fn per_bs_scale(dep: &Deployment) -> f64 {
    dep.p_bs / dep.k_users as f64
}

/// Nominal mean and standard deviation under the AAECC model.
pub fn avg_interference_aaecc(dep: &Deployment) -> Result<InterferenceSummary> {
    dep.validate()?;
    let az = AzimuthGains::new(dep);
    let phi_m = dep.phi_m(dep.aaecc_radius());
    let lam = dep.density();
    let c = per_bs_scale(dep);
    let gmax = |r: f64| bf_gain_max(dep.bs_array, (dep.dh() / r).atan(), phi_m);
    let mean = radial(dep, |r| r * dep.path_gain(r) * gmax(r) * az.at(dep, r, 1))?;
    let second = radial(dep, |r| r * (dep.path_gain(r) * gmax(r)).powi(2) * az.at(dep, r, 2))?;
    Ok(InterferenceSummary {
        mean_w: lam * c * mean.value,
        std_w: lam.sqrt() * c * second.value.sqrt(),
        std_defined: true,
        model: CellModel::Aaecc,
        quadrature_error: lam * c * mean.error,
        warning: None,
    })
}

fn approx_prefactor(dep: &Deployment) -> Result<f64> {
    dep.validate()?;
    if dep.r_exc <= 0.0 {
        return invalid("large-exclusion approximations diverge at r_exc = 0");
    }
    Ok(dep.density() * dep.p_bs * dep.pl_ref / (dep.k_users as f64 * (dep.alpha - 2.0) * dep.r_exc.powf(dep.alpha - 2.0)))
}

/// Closed-form AAECC mean and standard deviation for r_exc much larger than the antenna heights.
pub fn avg_interference_aaecc_approx(dep: &Deployment) -> Result<InterferenceSummary> {
    let pre = approx_prefactor(dep)?;
    let az = AzimuthGains::new(dep);
    let g = bf_gain_max(dep.bs_array, 0.0, dep.phi_m(dep.aaecc_radius()));
    let mean = pre * g * az.horizon(dep, 1);
    let std = dep.density().sqrt() * dep.p_bs * dep.pl_ref * g
        / ((2.0 * dep.alpha - 2.0).sqrt() * dep.k_users as f64 * dep.r_exc.powf(dep.alpha - 1.0))
        * az.horizon(dep, 2).sqrt();
    Ok(InterferenceSummary {
        mean_w: mean,
        std_w: std,
        std_defined: true,
        model: CellModel::AaeccApprox,
        quadrature_error: 0.0,
        warning: dep.regime_warning(),
    })
}

/// Circumradius density tabulated on a fixed Gauss rule.
pub struct CircumTable {
    pub r: Vec<f64>,
    /// Quadrature weight times density.
    pub wf: Vec<f64>,
    /// Largest truncation residual seen at any node.
    pub residual: f64,
}

impl CircumTable {
    pub fn new(dep: &Deployment, k_max: usize) -> Result<Self> {
        let lam = dep.density();
        let hi = circumradius_upper(lam);
        let kink = dep.h_bs / (1.0 / dep.bs_array.n_el as f64).asin().tan();
        let ra = dep.aaecc_radius();
        let br = quad::breakpoints(0.0, hi, [0.5 * ra, ra, 1.5 * ra, kink]);
        let (r, w) = quad::composite(&br, 6);
        let mut wf = Vec::with_capacity(r.len());
        let mut residual: f64 = 0.0;
        for (x, wx) in r.iter().zip(&w) {
            let v = circumradius_pdf(lam, *x, k_max)?;
            residual = residual.max(v.residual);
            wf.push(wx * v.value);
        }
        Ok(Self { r, wf, residual })
    }

    pub fn mass(&self) -> f64 {
        self.wf.iter().sum()
    }

    /// Average of G_max(phi, phi_m(r_c)) against the tabulated density.
    pub fn mean_gain(&self, dep: &Deployment, phi: f64) -> f64 {
        self.r
            .iter()
            .zip(&self.wf)
            .map(|(rc, wf)| wf * bf_gain_max(dep.bs_array, phi, dep.phi_m(*rc)))
            .sum()
    }
}

/// Worst-case average interference under the CBC model.
pub fn avg_interference_cbc(dep: &Deployment, pdf_kmax: usize) -> Result<InterferenceSummary> {
    dep.validate()?;
    let table = CircumTable::new(dep, pdf_kmax)?;
    avg_interference_cbc_with(dep, &table)
}

pub fn avg_interference_cbc_with(dep: &Deployment, table: &CircumTable) -> Result<InterferenceSummary> {
    let az = AzimuthGains::new(dep);
    let lam = dep.density();
    let c = per_bs_scale(dep);
    let mean = radial(dep, |r| {
        r * dep.path_gain(r) * az.at(dep, r, 1) * table.mean_gain(dep, (dep.dh() / r).atan())
    })?;
    Ok(InterferenceSummary {
        mean_w: lam * c * mean.value,
        std_w: 0.0,
        std_defined: false,
        model: CellModel::Cbc,
        quadrature_error: lam * c * mean.error,
        warning: None,
    })
}

/// Separable large-exclusion approximation of the CBC mean.
pub fn avg_interference_cbc_approx(dep: &Deployment, pdf_kmax: usize) -> Result<InterferenceSummary> {
    let pre = approx_prefactor(dep)?;
    let table = CircumTable::new(dep, pdf_kmax)?;
    let az = AzimuthGains::new(dep);
    Ok(InterferenceSummary {
        mean_w: pre * az.horizon(dep, 1) * table.mean_gain(dep, 0.0),
        std_w: 0.0,
        std_defined: false,
        model: CellModel::CbcApprox,
        quadrature_error: 0.0,
        warning: dep.regime_warning(),
    })
}

/// Ratio of the CBC to AAECC approximate means.
pub fn eta_ca(dep: &Deployment, pdf_kmax: usize) -> Result<f64> {
    dep.validate()?;
    let table = CircumTable::new(dep, pdf_kmax)?;
    Ok(table.mean_gain(dep, 0.0) / bf_gain_max(dep.bs_array, 0.0, dep.phi_m(dep.aaecc_radius())))
}

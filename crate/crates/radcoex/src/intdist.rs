//! Dominant-interferer model: equi-interference contours, the law of the
//! farthest contour distance r_dom, and total interference as a function of it.
//!
//! Every angular integral depends on r only through the set of azimuths where
//! the contour clears the exclusion zone, |rho|^(4/alpha) >= (r_exc / r)^2.
//! Nodes are sorted by |rho|^(4/alpha) so each evaluation is a binary search
//! plus prefix sums.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::antenna::{azimuth_gain_ratio, bf_gain_max, horizon_elevation_gain, main_lobe_azimuth};
use crate::error::{invalid, Error, Result};
use crate::quad;
use crate::stochgeom::Deployment;

const MIN_NODES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaConstant {
    /// W m^alpha
    pub kappa: f64,
    /// Dominant power from a BS on the exclusion boundary in the main lobe.
    pub i_exc: f64,
}

/// kappa = P G_BS^max(0, phi_m(r_a)) PL(r0) / K * N_az^rad * elevation kernel at phi_rad.
pub fn kappa(dep: &Deployment) -> Result<KappaConstant> {
    dep.validate()?;
    let g_bs = bf_gain_max(dep.bs_array, 0.0, dep.phi_m(dep.aaecc_radius()));
    let g_rad = dep.rad_array.n_az as f64 * horizon_elevation_gain(dep.rad_array, dep.rad_point);
    let kappa = dep.p_bs * dep.pl_ref * g_bs / dep.k_users as f64 * g_rad;
    if !(kappa > 0.0) {
        return invalid("kappa must be positive (check p_bs and arrays)");
    }
    Ok(KappaConstant {
        kappa,
        i_exc: kappa * dep.r_exc.powf(-dep.alpha),
    })
}

/// Contour distance at azimuth theta for farthest distance r_dom.
pub fn contour_radius(dep: &Deployment, r_dom: f64, theta: f64) -> f64 {
    let rho = azimuth_gain_ratio(dep.rad_array.n_az, dep.rad_point, theta);
    r_dom * rho.abs().powf(2.0 / dep.alpha)
}

/// Angular rule over [-pi/2, pi/2] with breakpoints at the azimuth-kernel
/// nulls and the main lobe, graded towards each null.
pub fn contour_rule(dep: &Deployment, min_nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let n = dep.rad_array.n_az as f64;
    let u0 = dep.rad_point.azimuth.sin() * dep.rad_point.elevation.cos();
    let mut cuts = vec![main_lobe_azimuth(dep.rad_point)];
    if dep.rad_array.n_az > 1 {
        let m_max = (n + 1.0) as i64;
        for m in -m_max..=m_max {
            if m == 0 || m % dep.rad_array.n_az as i64 == 0 {
                continue;
            }
            let s = u0 - 2.0 * m as f64 / n;
            if s > -1.0 && s < 1.0 {
                cuts.push(s.asin());
            }
        }
    }
    let coarse = quad::breakpoints(-FRAC_PI_2, FRAC_PI_2, cuts);
    let mut fine = Vec::new();
    for w in coarse.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = b - a;
        for f in [0.0, 1.0 / 256.0, 1.0 / 64.0, 1.0 / 16.0, 0.25, 0.5, 0.75, 15.0 / 16.0, 63.0 / 64.0, 255.0 / 256.0] {
            fine.push(a + f * h);
        }
    }
    fine.push(FRAC_PI_2);
    let segs = fine.len() - 1;
    let panels = min_nodes.div_ceil(16 * segs).max(1);
    quad::composite(&fine, panels)
}

#[derive(Debug, Clone)]
pub struct ContourModel {
    pub dep: Deployment,
    pub kappa: KappaConstant,
    /// |rho|^(4/alpha), descending.
    q: Vec<f64>,
    /// Prefix sums aligned with `q` (entry i covers nodes 0..i).
    cum_w: Vec<f64>,
    cum_wq: Vec<f64>,
    cum_wrho2: Vec<f64>,
    warning: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfValue {
    pub p: f64,
    /// True when the argument was outside the support and the CDF was clamped.
    pub clamped: bool,
}

impl ContourModel {
    pub fn new(dep: &Deployment) -> Result<Self> {
        Self::with_nodes(dep, MIN_NODES)
    }

    pub fn with_nodes(dep: &Deployment, min_nodes: usize) -> Result<Self> {
        let kappa = kappa(dep)?;
        let (theta, w) = contour_rule(dep, min_nodes);
        let p = 4.0 / dep.alpha;
        let mut nodes: Vec<(f64, f64, f64)> = theta
            .iter()
            .zip(&w)
            .map(|(t, w)| {
                let rho = azimuth_gain_ratio(dep.rad_array.n_az, dep.rad_point, *t);
                (rho.abs().powf(p), *w, rho * rho)
            })
            .collect();
        nodes.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut q = Vec::with_capacity(nodes.len());
        let mut cum_w = vec![0.0];
        let mut cum_wq = vec![0.0];
        let mut cum_wrho2 = vec![0.0];
        for (qq, ww, r2) in nodes {
            q.push(qq);
            cum_w.push(cum_w.last().unwrap() + ww);
            cum_wq.push(cum_wq.last().unwrap() + ww * qq);
            cum_wrho2.push(cum_wrho2.last().unwrap() + ww * r2);
        }
        Ok(Self {
            dep: *dep,
            kappa,
            q,
            cum_w,
            cum_wq,
            cum_wrho2,
            warning: dep.regime_warning(),
        })
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    pub fn nodes(&self) -> usize {
        self.q.len()
    }

    /// Number of nodes whose contour reaches past r_exc at farthest distance r.
    fn active(&self, r: f64) -> usize {
        if self.dep.r_exc <= 0.0 {
            return self.q.len();
        }
        if r <= 0.0 {
            return 0;
        }
        let t = (self.dep.r_exc / r).powi(2);
        self.q.partition_point(|&x| x >= t)
    }

    /// Area outside the exclusion zone enclosed by the contour C(r_dom).
    pub fn area(&self, r_dom: f64) -> f64 {
        let k = self.active(r_dom);
        let r2 = self.dep.r_exc * self.dep.r_exc;
        (0.5 * (r_dom * r_dom * self.cum_wq[k] - r2 * self.cum_w[k])).max(0.0)
    }

    /// dA/dr_dom.
    pub fn area_rate(&self, r_dom: f64) -> f64 {
        r_dom * self.cum_wq[self.active(r_dom)]
    }

    pub fn rdom_cdf(&self, r_dom: f64) -> f64 {
        if r_dom <= self.dep.r_exc {
            return 0.0;
        }
        -(-self.dep.density() * self.area(r_dom)).exp_m1()
    }

    pub fn rdom_pdf(&self, r_dom: f64) -> f64 {
        if r_dom < self.dep.r_exc {
            return 0.0;
        }
        let lam = self.dep.density();
        lam * self.area_rate(r_dom) * (-lam * self.area(r_dom)).exp()
    }

    /// Survival 1 - F(r_dom), kept accurate in the far tail.
    pub fn rdom_sf(&self, r_dom: f64) -> f64 {
        if r_dom <= self.dep.r_exc {
            return 1.0;
        }
        (-self.dep.density() * self.area(r_dom)).exp()
    }

    /// r_dom at which the survival probability equals `sf`.
    pub fn rdom_quantile_sf(&self, sf: f64) -> f64 {
        let target = -sf.ln() / self.dep.density();
        let lo0 = self.dep.r_exc;
        let mut hi = if lo0 > 0.0 { 2.0 * lo0 } else { self.dep.aaecc_radius() };
        while self.area(hi) < target {
            hi *= 2.0;
        }
        let mut lo = lo0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.area(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn i_dom(&self, r_dom: f64) -> f64 {
        self.kappa.kappa * r_dom.powf(-self.dep.alpha)
    }

    fn r_of_i(&self, i: f64) -> f64 {
        (self.kappa.kappa / i).powf(1.0 / self.dep.alpha)
    }

    fn check_i(&self, i: f64) -> Result<()> {
        if !(i > 0.0) {
            return invalid("dominant power must be positive");
        }
        if i > self.kappa.i_exc * (1.0 + 1e-12) {
            return Err(Error::OutOfSupport(format!(
                "dominant power {i:e} W exceeds I_exc = {:e} W",
                self.kappa.i_exc
            )));
        }
        Ok(())
    }

    pub fn idom_cdf(&self, i: f64) -> Result<f64> {
        self.check_i(i)?;
        Ok(self.rdom_sf(self.r_of_i(i)))
    }

    pub fn idom_pdf(&self, i: f64) -> Result<f64> {
        self.check_i(i)?;
        let r = self.r_of_i(i);
        Ok(self.rdom_pdf(r) * r / (self.dep.alpha * i))
    }

    /// Dominant power plus the conditional mean of all other BSs.
    pub fn itot_di(&self, r_dom: f64) -> f64 {
        let a = self.dep.alpha;
        let k = self.active(r_dom);
        let inside = r_dom.powf(2.0 - a) * self.cum_wq[k];
        let outside = if self.dep.r_exc > 0.0 {
            self.dep.r_exc.powf(2.0 - a) * (self.cum_wrho2[self.q.len()] - self.cum_wrho2[k])
        } else {
            0.0
        };
        self.kappa.kappa * (r_dom.powf(-a) + self.dep.density() / (a - 2.0) * (inside + outside))
    }

    /// Upper end of the total-interference support, attained at r_dom = r_exc.
    pub fn itot_sup(&self) -> f64 {
        if self.dep.r_exc <= 0.0 {
            f64::INFINITY
        } else {
            self.itot_di(self.dep.r_exc)
        }
    }

    /// r_dom solving itot_di(r) = i, for i inside the open support.
    pub fn invert_itot(&self, i: f64) -> Result<f64> {
        if !(i > 0.0) || i >= self.itot_sup() {
            return Err(Error::OutOfSupport(format!("total interference {i:e} W outside support")));
        }
        let mut lo = if self.dep.r_exc > 0.0 {
            self.dep.r_exc
        } else {
            self.r_of_i(i).min(1.0)
        };
        while self.itot_di(lo) < i {
            lo *= 0.5;
        }
        let mut hi = lo.max(1.0) * 2.0;
        while self.itot_di(hi) > i {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if self.itot_di(mid) > i {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// P[I_tot <= i] under the dominant-interferer approximation.
    pub fn itot_cdf_di(&self, i: f64) -> CdfValue {
        if !(i > 0.0) {
            return CdfValue { p: 0.0, clamped: true };
        }
        if i >= self.itot_sup() {
            return CdfValue { p: 1.0, clamped: true };
        }
        let r = self.invert_itot(i).expect("inside support");
        CdfValue {
            p: self.rdom_sf(r),
            clamped: false,
        }
    }

    /// Nodes r_j and weights w_j with sum_j w_j g(r_j) ~ E[g(r_dom)], built on
    /// the probability scale u = F(r_dom) and truncated where 1 - F < tail.
    pub fn mixing_rule(&self, panels: usize, tail: f64) -> (Vec<f64>, Vec<f64>) {
        let (u, w) = quad::composite(&[0.0, 0.5, 0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-6, 1.0 - tail], panels);
        let r = u.iter().map(|u| self.rdom_quantile_sf(1.0 - u)).collect();
        (r, w)
    }
}

/// Mean of `g(r_dom)` for the convenience of callers that do not keep the rule.
pub fn expect_over_rdom<F: Fn(f64) -> f64>(model: &ContourModel, g: F) -> f64 {
    let (r, w) = model.mixing_rule(8, 1e-10);
    r.iter().zip(&w).map(|(r, w)| w * g(*r)).sum()
}

/// Area enclosed by C(r_dom) outside the exclusion zone.
pub fn area_enclosed(dep: &Deployment, r_dom: f64) -> Result<f64> {
    if r_dom < dep.r_exc {
        return invalid("r_dom below r_exc");
    }
    Ok(ContourModel::new(dep)?.area(r_dom))
}

pub fn rdom_cdf(dep: &Deployment, r_dom: f64) -> Result<f64> {
    Ok(ContourModel::new(dep)?.rdom_cdf(r_dom))
}

pub fn rdom_pdf(dep: &Deployment, r_dom: f64) -> Result<f64> {
    Ok(ContourModel::new(dep)?.rdom_pdf(r_dom))
}

pub fn idom_cdf(dep: &Deployment, i: f64) -> Result<f64> {
    ContourModel::new(dep)?.idom_cdf(i)
}

pub fn idom_pdf(dep: &Deployment, i: f64) -> Result<f64> {
    ContourModel::new(dep)?.idom_pdf(i)
}

pub fn itot_di(dep: &Deployment, r_dom: f64) -> Result<f64> {
    if r_dom < dep.r_exc {
        return invalid("r_dom below r_exc");
    }
    Ok(ContourModel::new(dep)?.itot_di(r_dom))
}

pub fn itot_cdf_di(dep: &Deployment, i: f64) -> Result<CdfValue> {
    Ok(ContourModel::new(dep)?.itot_cdf_di(i))
}

/// Area of a half disc annulus, handy for the omnidirectional check.
pub fn half_annulus(r_out: f64, r_in: f64) -> f64 {
    0.5 * PI * (r_out * r_out - r_in * r_in)
}

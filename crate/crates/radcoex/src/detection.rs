//! Radar detection under interference: conditional laws of the window-average
//! power, spatial P_d / P_fa mixed over the dominant-interferer distance, ROC
//! sweeps and the minimum exclusion radius.

use std::fmt;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::intdist::ContourModel;
use crate::special::{erlang_cdf, erlang_sf, marcum_q, normal_cdf};
use crate::stochgeom::Deployment;

/// Mixing integral is cut where 1 - F_Rdom drops below this.
pub const MIX_TAIL: f64 = 1e-10;
const MIX_PANELS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionSetup {
    /// Estimation window N.
    pub n_samples: usize,
    /// Target return power, W.
    pub p_tar: f64,
    /// Noise variance, W.
    pub noise_w: f64,
    /// Detection threshold, W.
    pub p_th: f64,
}

impl DetectionSetup {
    pub fn new(n_samples: usize, p_tar: f64, noise_w: f64, p_th: f64) -> Result<Self> {
        let s = Self {
            n_samples,
            p_tar,
            noise_w,
            p_th,
        };
        s.validate()?;
        Ok(s)
    }

    /// Radar settings used for the detection figures.
    pub fn reference() -> Self {
        Self {
            n_samples: 10,
            p_tar: 1e-7,
            noise_w: 1e-9,
            p_th: 1e-7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return invalid("n_samples must be >= 1");
        }
        for (name, v) in [("p_tar", self.p_tar), ("noise_w", self.noise_w), ("p_th", self.p_th)] {
            if !(v >= 0.0) || !v.is_finite() {
                return invalid(format!("{name} must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn with_threshold(&self, p_th: f64) -> Self {
        Self { p_th, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Chisq,
    Clt,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Chisq => "CHISQ",
            Method::Clt => "CLT",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub p_th: f64,
    pub pfa: f64,
    pub pd: f64,
    pub method: Method,
}

/// P[P_rad <= p | I_tot = i_tot, hypothesis].
pub fn cond_cdf(setup: &DetectionSetup, i_tot: f64, hyp: Hypothesis, p: f64, method: Method) -> Result<f64> {
    Ok(1.0 - cond_tail(setup, i_tot, hyp, p, method)?)
}

/// P[P_rad > p | I_tot = i_tot, hypothesis], computed directly so small tails keep precision.
pub fn cond_tail(setup: &DetectionSetup, i_tot: f64, hyp: Hypothesis, p: f64, method: Method) -> Result<f64> {
    setup.validate()?;
    if !(i_tot >= 0.0) || !(p >= 0.0) {
        return invalid("interference and threshold must be >= 0");
    }
    let n = setup.n_samples;
    let nf = n as f64;
    let s = i_tot + setup.noise_w;
    if !(s > 0.0) {
        // no randomness at all: P_rad is the target power
        let level = if hyp == Hypothesis::H1 { setup.p_tar } else { 0.0 };
        return Ok(if level > p { 1.0 } else { 0.0 });
    }
    if p == 0.0 {
        // P_rad is a mean of squared magnitudes, positive almost surely
        return Ok(1.0);
    }
    let h1 = hyp == Hypothesis::H1 && setup.p_tar > 0.0;
    Ok(match (method, h1) {
        (Method::Chisq, false) => erlang_sf(n, nf * p / s),
        (Method::Chisq, true) => marcum_q(n, (2.0 * nf * setup.p_tar / s).sqrt(), (2.0 * nf * p / s).sqrt())?,
        (Method::Clt, false) => normal_cdf(-nf.sqrt() * (p - s) / s),
        (Method::Clt, true) => {
            let pt = setup.p_tar;
            let sd = ((pt + s).powi(2) - pt * pt).sqrt();
            normal_cdf(-nf.sqrt() * (p - pt - s) / sd)
        }
    })
}

/// Erlang CDF of the H0 statistic without interference, for the r_exc -> infinity limit.
pub fn interference_free_pfa(setup: &DetectionSetup) -> f64 {
    1.0 - erlang_cdf(setup.n_samples, setup.n_samples as f64 * setup.p_th / setup.noise_w)
}

/// Precomputed r_dom mixing rule and I_tot,DI at its nodes for one deployment.
#[derive(Debug, Clone)]
pub struct SpatialDetector {
    pub model: ContourModel,
    weights: Vec<f64>,
    i_tot: Vec<f64>,
}

impl SpatialDetector {
    pub fn new(dep: &Deployment) -> Result<Self> {
        let model = ContourModel::new(dep)?;
        let (r, weights) = model.mixing_rule(MIX_PANELS, MIX_TAIL);
        let i_tot = r.iter().map(|r| model.itot_di(*r)).collect();
        Ok(Self { model, weights, i_tot })
    }

    fn mix(&self, setup: &DetectionSetup, hyp: Hypothesis, method: Method) -> Result<f64> {
        setup.validate()?;
        let mut acc = 0.0;
        for (w, i) in self.weights.iter().zip(&self.i_tot) {
            acc += w * cond_tail(setup, *i, hyp, setup.p_th, method)?;
        }
        // the truncated tail lies at large r_dom where I_tot is smallest
        let far = cond_tail(setup, *self.i_tot.last().unwrap_or(&0.0), hyp, setup.p_th, method)?;
        Ok((acc + MIX_TAIL * far).clamp(0.0, 1.0))
    }

    pub fn pfa(&self, setup: &DetectionSetup, method: Method) -> Result<f64> {
        self.mix(setup, Hypothesis::H0, method)
    }

    pub fn pd(&self, setup: &DetectionSetup, method: Method) -> Result<f64> {
        self.mix(setup, Hypothesis::H1, method)
    }

    /// Nodes of the mixing rule as (weight, I_tot,DI).
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.i_tot.iter().copied())
    }
}

pub fn spatial_pfa(dep: &Deployment, setup: &DetectionSetup, method: Method) -> Result<f64> {
    SpatialDetector::new(dep)?.pfa(setup, method)
}

pub fn spatial_pd(dep: &Deployment, setup: &DetectionSetup, method: Method) -> Result<f64> {
    SpatialDetector::new(dep)?.pd(setup, method)
}

pub fn roc_curve(dep: &Deployment, setup: &DetectionSetup, thresholds: &[f64], method: Method) -> Result<Vec<RocPoint>> {
    if thresholds.windows(2).any(|w| w[1] < w[0]) {
        return invalid("thresholds must be sorted ascending");
    }
    let det = SpatialDetector::new(dep)?;
    thresholds
        .par_iter()
        .map(|&p_th| {
            let s = setup.with_threshold(p_th);
            Ok(RocPoint {
                p_th,
                pfa: det.pfa(&s, method)?,
                pd: det.pd(&s, method)?,
                method,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub r_exc: f64,
    pub pd: f64,
    pub pfa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionSearch {
    /// Smallest feasible candidate, None when no candidate qualifies.
    pub radius: Option<f64>,
    /// Every evaluation made, in candidate order.
    pub evaluated: Vec<Evaluated>,
    /// True when a non-monotone evaluation forced a full scan.
    pub linear_scan: bool,
}

/// Smallest candidate with pd >= pd_thr and pfa <= pfa_thr.
///
/// P_fa is expected nonincreasing in r_exc, P_d monotone in either direction.
/// Binary searches exploit that; any violation seen among the evaluated
/// points falls back to scanning every candidate.
pub fn min_exclusion_search<F>(candidates: &[f64], pd_thr: f64, pfa_thr: f64, mut eval: F) -> Result<ExclusionSearch>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    if candidates.is_empty() {
        return invalid("candidate grid is empty");
    }
    if candidates.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("candidates must be strictly ascending");
    }
    let n = candidates.len();
    let mut cache: Vec<Option<(f64, f64)>> = vec![None; n];
    let mut get = |i: usize, cache: &mut Vec<Option<(f64, f64)>>| -> Result<(f64, f64)> {
        if let Some(v) = cache[i] {
            return Ok(v);
        }
        let v = eval(candidates[i])?;
        cache[i] = Some(v);
        Ok(v)
    };
    let pd_ok = |v: (f64, f64)| v.0 >= pd_thr;
    let pfa_ok = |v: (f64, f64)| v.1 <= pfa_thr;

    // first index where pfa is acceptable
    let mut lo = 0usize;
    let mut hi = n;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pfa_ok(get(mid, &mut cache)?) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let i_fa = lo;
    let mut found = None;
    if i_fa < n {
        let first = get(i_fa, &mut cache)?;
        if pd_ok(first) {
            found = Some(i_fa);
        } else {
            let last = get(n - 1, &mut cache)?;
            if pd_ok(last) {
                let (mut lo, mut hi) = (i_fa + 1, n - 1);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if pd_ok(get(mid, &mut cache)?) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                found = Some(lo);
            }
        }
    }

    let seen: Vec<(usize, (f64, f64))> = cache.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
    let tol = 1e-12;
    let pfa_mono = seen.windows(2).all(|w| w[1].1 .1 <= w[0].1 .1 + tol);
    let pd_up = seen.windows(2).all(|w| w[1].1 .0 + tol >= w[0].1 .0);
    let pd_down = seen.windows(2).all(|w| w[1].1 .0 <= w[0].1 .0 + tol);
    let linear_scan = !(pfa_mono && (pd_up || pd_down));
    if linear_scan {
        found = None;
        for i in 0..n {
            let v = get(i, &mut cache)?;
            if pd_ok(v) && pfa_ok(v) {
                found = Some(i);
                break;
            }
        }
    }
    let evaluated = cache
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            v.map(|(pd, pfa)| Evaluated {
                r_exc: candidates[i],
                pd,
                pfa,
            })
        })
        .collect();
    Ok(ExclusionSearch {
        radius: found.map(|i| candidates[i]),
        evaluated,
        linear_scan,
    })
}

/// Analytic minimum exclusion radius; `dep.r_exc` is ignored.
pub fn min_exclusion_radius(
    dep: &Deployment,
    setup: &DetectionSetup,
    pd_thr: f64,
    pfa_thr: f64,
    candidates: &[f64],
    method: Method,
) -> Result<ExclusionSearch> {
    min_exclusion_search(candidates, pd_thr, pfa_thr, |r_exc| {
        let det = SpatialDetector::new(&Deployment { r_exc, ..*dep })?;
        Ok((det.pd(setup, method)?, det.pfa(setup, method)?))
    })
}

//! Monte Carlo oracle: PPP realizations with the exact link kernel,
//! empirical laws, detection trials and histogram divergences.
//!
//! Trial `t` always draws from ChaCha8 stream `t` of the configured seed and
//! per-trial results are reduced in index order, so aggregates do not depend
//! on the number of worker threads.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::antenna::{bf_gain_max, radar_gain, Pointing};
use crate::avgint::{avg_interference_aaecc, avg_interference_aaecc_approx, CellModel};
use crate::detection::{min_exclusion_search, DetectionSetup, ExclusionSearch};
use crate::error::{invalid, Error, Result};
use crate::intdist::kappa;
use crate::stochgeom::{circumradius_cdf, circumradius_upper, sample_ppp_sector, Deployment, PlanarPoint};

/// Fraction of the mean interference allowed beyond the sampling radius.
pub const TRUNCATION: f64 = 1e-3;

/// Per-BS interference kernel used by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinkKernel {
    /// 3D distance and exact elevation angles.
    #[default]
    Exact,
    /// Every BS on the radar horizon at its ground distance, as in the contour theory.
    Horizon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    /// Cbc or Aaecc.
    pub cell_model: CellModel,
    pub bins: usize,
    pub kernel: LinkKernel,
}

impl McConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            cell_model: CellModel::Aaecc,
            bins: 200,
            kernel: LinkKernel::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("trials must be >= 1");
        }
        if self.bins < 2 {
            return invalid("bins must be >= 2");
        }
        if !matches!(self.cell_model, CellModel::Cbc | CellModel::Aaecc) {
            return invalid("Monte Carlo cell model must be CBC or AAECC");
        }
        Ok(())
    }
}

pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Radius beyond which the mean interference, by the large-distance law,
/// is below `rel` times `reference_w`.
pub fn truncation_radius(dep: &Deployment, rel: f64, reference_w: f64) -> Result<f64> {
    let unit = avg_interference_aaecc_approx(&Deployment { r_exc: 1.0, ..*dep })?.mean_w;
    let r = (unit / (rel * reference_w)).powf(1.0 / (dep.alpha - 2.0));
    Ok(r.max(2.0 * dep.r_exc).max(4.0 * dep.aaecc_radius()))
}

/// Inverse-CDF sampler for the circumradius series law.
#[derive(Debug, Clone)]
pub struct CircumSampler {
    r: Vec<f64>,
    cdf: Vec<f64>,
}

impl CircumSampler {
    pub fn new(lambda_m2: f64, k_max: usize) -> Result<Self> {
        let hi = circumradius_upper(lambda_m2);
        let n = 4096;
        let mut r = Vec::with_capacity(n + 1);
        let mut cdf = Vec::with_capacity(n + 1);
        let mut run: f64 = 0.0;
        for i in 0..=n {
            let x = hi * i as f64 / n as f64;
            let v = if i == 0 { 0.0 } else { circumradius_cdf(lambda_m2, x, k_max)?.value };
            run = run.max(v);
            r.push(x);
            cdf.push(run);
        }
        let top = run;
        if !(top > 0.0) {
            return Err(Error::Series("circumradius CDF table is empty".into()));
        }
        cdf.iter_mut().for_each(|c| *c /= top);
        Ok(Self { r, cdf })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let j = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[j - 1], self.cdf[j]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.r[j - 1] + t * (self.r[j] - self.r[j - 1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Realization {
    pub i_tot: f64,
    pub i_dom: f64,
    /// (kappa / i_dom)^(1/alpha); infinite for an empty realization.
    pub r_dom_emp: f64,
}

pub fn link(dep: &Deployment, kernel: LinkKernel, r: f64, theta: f64, phi_m: f64) -> f64 {
    match kernel {
        LinkKernel::Exact => dep.link_interference(r, theta, phi_m),
        LinkKernel::Horizon => {
            let arrival = Pointing { azimuth: theta, elevation: 0.0 };
            dep.p_bs / dep.k_users as f64
                * dep.pl_ref
                * r.powf(-dep.alpha)
                * radar_gain(dep.rad_array, dep.rad_point, arrival)
                * bf_gain_max(dep.bs_array, 0.0, phi_m)
        }
    }
}

/// Sum the per-BS kernel over a point set.
pub fn accumulate(
    dep: &Deployment,
    kernel: LinkKernel,
    kappa: f64,
    points: &[PlanarPoint],
    phi_m: impl Fn(usize) -> f64,
) -> Realization {
    let mut i_tot = 0.0;
    let mut i_dom: f64 = 0.0;
    for (k, p) in points.iter().enumerate() {
        let g = link(dep, kernel, p.r, p.theta, phi_m(k));
        i_tot += g;
        i_dom = i_dom.max(g);
    }
    let r_dom_emp = if i_dom > 0.0 {
        (kappa / i_dom).powf(1.0 / dep.alpha)
    } else {
        f64::INFINITY
    };
    Realization { i_tot, i_dom, r_dom_emp }
}

/// Everything a trial needs, computed once per deployment.
#[derive(Debug, Clone)]
pub struct Realizer {
    pub dep: Deployment,
    pub mc: McConfig,
    pub kappa: f64,
    pub r_max: f64,
    phi_aaecc: f64,
    circum: Option<CircumSampler>,
}

impl Realizer {
    pub fn new(dep: &Deployment, mc: &McConfig) -> Result<Self> {
        let mean = avg_interference_aaecc(dep)?.mean_w;
        let r_max = truncation_radius(dep, TRUNCATION, mean)?;
        Self::with_radius(dep, mc, r_max)
    }

    pub fn with_radius(dep: &Deployment, mc: &McConfig, r_max: f64) -> Result<Self> {
        dep.validate()?;
        mc.validate()?;
        if !(r_max > dep.r_exc) {
            return invalid("sampling radius must exceed r_exc");
        }
        let circum = match mc.cell_model {
            CellModel::Cbc => Some(CircumSampler::new(dep.density(), 3)?),
            _ => None,
        };
        Ok(Self {
            dep: *dep,
            mc: *mc,
            kappa: kappa(dep)?.kappa,
            r_max,
            phi_aaecc: dep.phi_m(dep.aaecc_radius()),
            circum,
        })
    }

    pub fn points(&self, rng: &mut ChaCha8Rng) -> Vec<PlanarPoint> {
        self.points_in(self.dep.r_exc, self.r_max, rng)
    }

    fn points_in(&self, r_lo: f64, r_hi: f64, rng: &mut ChaCha8Rng) -> Vec<PlanarPoint> {
        sample_ppp_sector(self.dep.density(), r_lo, r_hi, -FRAC_PI_2, FRAC_PI_2, rng).expect("validated sector")
    }

    fn phis(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match &self.circum {
            Some(s) => (0..n).map(|_| self.dep.phi_m(s.sample(rng))).collect(),
            None => vec![self.phi_aaecc; n],
        }
    }

    fn realize_in(&self, r_lo: f64, r_hi: f64, rng: &mut ChaCha8Rng) -> Realization {
        let pts = self.points_in(r_lo, r_hi, rng);
        let phis = self.phis(pts.len(), rng);
        accumulate(&self.dep, self.mc.kernel, self.kappa, &pts, |k| phis[k])
    }

    pub fn trial(&self, index: u64) -> Realization {
        let mut rng = trial_rng(self.mc.seed, index);
        self.realize_in(self.dep.r_exc, self.r_max, &mut rng)
    }

    pub fn run(&self) -> Vec<Realization> {
        (0..self.mc.trials as u64).into_par_iter().map(|t| self.trial(t)).collect()
    }
}

pub fn realize_interference(dep: &Deployment, mc: &McConfig, trial_index: u64) -> Result<Realization> {
    Ok(Realizer::new(dep, mc)?.trial(trial_index))
}

/// Total interference of one trial with per-BS circumradii drawn i.i.d. from the series law.
pub fn circumcircle_interference_trial(dep: &Deployment, mc: &McConfig, trial_index: u64) -> Result<f64> {
    let mc = McConfig {
        cell_model: CellModel::Cbc,
        ..*mc
    };
    Ok(Realizer::new(dep, &mc)?.trial(trial_index).i_tot)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummary {
    pub mean: f64,
    pub std: f64,
    /// Standard error of `mean`.
    pub se_mean: f64,
    pub trials: usize,
}

fn summarize(x: &[f64]) -> McSummary {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = if x.len() > 1 {
        x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    McSummary {
        mean,
        std: var.sqrt(),
        se_mean: (var / n).sqrt(),
        trials: x.len(),
    }
}

/// Plain mean and standard deviation of the total interference.
pub fn mc_interference(dep: &Deployment, mc: &McConfig) -> Result<McSummary> {
    let runs = Realizer::new(dep, mc)?.run();
    let x: Vec<f64> = runs.iter().map(|r| r.i_tot).collect();
    Ok(summarize(&x))
}

/// Mean and standard deviation by independent annuli [b 2^j, b 2^(j+1)], with
/// `mc.trials` realizations of the innermost annulus and a quarter as many
/// for each doubling, never fewer than `mc.trials / 64`.
pub fn mc_interference_stratified(dep: &Deployment, mc: &McConfig) -> Result<McSummary> {
    let re = Realizer::new(dep, mc)?;
    let base = if dep.r_exc > 0.0 { dep.r_exc } else { dep.aaecc_radius() };
    let mut edges = if dep.r_exc > 0.0 { vec![dep.r_exc] } else { vec![0.0, base] };
    while *edges.last().unwrap() < re.r_max {
        let next = (edges.last().unwrap() * 2.0).min(re.r_max);
        edges.push(next);
    }
    let floor = (mc.trials / 64).max(1);
    let (mut mean, mut var, mut se2) = (0.0, 0.0, 0.0);
    let mut level = 0u32;
    for (j, w) in edges.windows(2).enumerate() {
        let n = (mc.trials >> (2 * level).min(63)).max(floor);
        if w[0] > 0.0 {
            level += 1;
        }
        let tag = (j as u64 + 1) << 48;
        let x: Vec<f64> = (0..n as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(mc.seed, tag | t);
                re.realize_in(w[0], w[1], &mut rng).i_tot
            })
            .collect();
        let s = summarize(&x);
        mean += s.mean;
        var += s.std * s.std;
        se2 += s.se_mean * s.se_mean;
    }
    Ok(McSummary {
        mean,
        std: var.sqrt(),
        se_mean: se2.sqrt(),
        trials: mc.trials,
    })
}

/// Right-continuous step CDF of a sample.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return invalid("empirical CDF of an empty sample");
        }
        if samples.iter().any(|x| x.is_nan()) {
            return invalid("sample contains NaN");
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// sup |F_n - F| checked on both sides of every jump.
    pub fn ks_against<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.sorted.len() as f64;
        let mut d: f64 = 0.0;
        for (i, x) in self.sorted.iter().enumerate() {
            let f = cdf(*x);
            d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
        }
        d
    }
}

pub fn empirical_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(samples)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let mut d: f64 = 0.0;
    for x in a.sorted.iter().chain(&b.sorted) {
        d = d.max((a.eval(*x) - b.eval(*x)).abs());
    }
    d
}

/// Bin edges uniform in log10 over [lo, hi].
pub fn log_edges(lo: f64, hi: f64, bins: usize) -> Result<Vec<f64>> {
    if bins < 2 || !(lo > 0.0) || !(hi > lo) {
        return invalid("histogram needs >= 2 bins over a positive range with hi > lo");
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..=bins).map(|k| 10f64.powf(a + (b - a) * k as f64 / bins as f64)).collect())
}

/// Normalized counts; values outside the edges go to the end bins.
pub fn histogram(samples: &[f64], edges: &[f64]) -> Vec<f64> {
    let bins = edges.len() - 1;
    let mut h = vec![0.0; bins];
    for x in samples {
        let k = edges.partition_point(|e| e <= x).saturating_sub(1).min(bins - 1);
        h[k] += 1.0;
    }
    let n = samples.len() as f64;
    h.iter_mut().for_each(|v| *v /= n);
    h
}

/// Bin masses of a CDF; mass outside the edges goes to the end bins.
pub fn cdf_masses<F: Fn(f64) -> f64>(cdf: F, edges: &[f64]) -> Vec<f64> {
    let bins = edges.len() - 1;
    (0..bins)
        .map(|k| {
            let lo = if k == 0 { 0.0 } else { cdf(edges[k]) };
            let hi = if k == bins - 1 { 1.0 } else { cdf(edges[k + 1]) };
            (hi - lo).max(0.0)
        })
        .collect()
}

/// Jensen-Shannon divergence of two probability vectors, log base 2.
pub fn jsd_probs(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() || p.len() < 2 {
        return invalid("distributions need the same number (>= 2) of bins");
    }
    let kl = |a: f64, m: f64| if a > 0.0 { a * (a / m).log2() } else { 0.0 };
    let mut d = 0.0;
    for (a, b) in p.iter().zip(q) {
        let m = 0.5 * (a + b);
        d += 0.5 * kl(*a, m) + 0.5 * kl(*b, m);
    }
    Ok(d.clamp(0.0, 1.0))
}

fn positive_range(x: &[f64]) -> Result<(f64, f64)> {
    let lo = x.iter().copied().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(0.0, f64::max);
    if !(lo.is_finite() && hi > lo) {
        return invalid("degenerate sample: fewer than two distinct positive values");
    }
    Ok((lo, hi))
}

/// JSD between two samples on a shared log-spaced histogram.
pub fn jsd(a: &[f64], b: &[f64], bins: usize) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return invalid("jsd of an empty sample");
    }
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let (lo, hi) = positive_range(&all)?;
    let edges = log_edges(lo, hi, bins)?;
    jsd_probs(&histogram(a, &edges), &histogram(b, &edges))
}

/// JSD between a sample and an analytic CDF on given bin edges.
pub fn jsd_against_cdf_on<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, edges: &[f64]) -> Result<f64> {
    if samples.is_empty() || edges.len() < 3 {
        return invalid("jsd needs samples and >= 2 bins");
    }
    jsd_probs(&histogram(samples, edges), &cdf_masses(cdf, edges))
}

/// JSD between a sample and an analytic CDF, binned over the sample range.
pub fn jsd_against_cdf<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, bins: usize) -> Result<f64> {
    if samples.is_empty() {
        return invalid("jsd of an empty sample");
    }
    let (lo, hi) = positive_range(samples)?;
    let edges = log_edges(lo, hi, bins)?;
    jsd_probs(&histogram(samples, &edges), &cdf_masses(cdf, &edges))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionEstimate {
    pub p_th: f64,
    pub pd: f64,
    pub pfa: f64,
    pub se_pd: f64,
    pub se_pfa: f64,
}

/// Normalized window statistics: with s = I_tot + noise,
/// P_rad,0 = s a0 and P_rad,1 = P_tar + s a1 + 2 sqrt(P_tar s) b1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowDraw {
    pub a0: f64,
    pub a1: f64,
    pub b1: f64,
}

impl WindowDraw {
    /// N unit-power circular complex Gaussian samples per hypothesis; the
    /// target phasor is fixed at phase zero.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut cn = || -> (f64, f64) { (h * rng.sample::<f64, _>(StandardNormal), h * rng.sample::<f64, _>(StandardNormal)) };
        let (mut a0, mut a1, mut b1) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let (x, y) = cn();
            a0 += x * x + y * y;
            let (x, y) = cn();
            a1 += x * x + y * y;
            b1 += x;
        }
        let nf = n as f64;
        Self {
            a0: a0 / nf,
            a1: a1 / nf,
            b1: b1 / nf,
        }
    }

    pub fn p_rad0(&self, s: f64) -> f64 {
        s * self.a0
    }

    pub fn p_rad1(&self, s: f64, p_tar: f64) -> f64 {
        p_tar + s * self.a1 + 2.0 * (p_tar * s).sqrt() * self.b1
    }
}

fn detection_counts(stats: &[(f64, f64)], thresholds: &[f64]) -> Vec<DetectionEstimate> {
    let n = stats.len() as f64;
    thresholds
        .iter()
        .map(|&p_th| {
            let (mut d, mut f) = (0usize, 0usize);
            for (p0, p1) in stats {
                f += usize::from(*p0 > p_th);
                d += usize::from(*p1 > p_th);
            }
            let (pd, pfa) = (d as f64 / n, f as f64 / n);
            DetectionEstimate {
                p_th,
                pd,
                pfa,
                se_pd: (pd * (1.0 - pd) / n).sqrt(),
                se_pfa: (pfa * (1.0 - pfa) / n).sqrt(),
            }
        })
        .collect()
}

/// Empirical P_d and P_fa on a threshold grid sharing the same trials.
pub fn empirical_detection_sweep(
    dep: &Deployment,
    setup: &DetectionSetup,
    thresholds: &[f64],
    mc: &McConfig,
) -> Result<Vec<DetectionEstimate>> {
    setup.validate()?;
    let re = Realizer::new(dep, mc)?;
    let stats: Vec<(f64, f64)> = (0..mc.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(mc.seed, t);
            let i = re.realize_in(dep.r_exc, re.r_max, &mut rng).i_tot;
            let w = WindowDraw::sample(setup.n_samples, &mut rng);
            let s = i + setup.noise_w;
            (w.p_rad0(s), w.p_rad1(s, setup.p_tar))
        })
        .collect();
    Ok(detection_counts(&stats, thresholds))
}

pub fn empirical_detection(dep: &Deployment, setup: &DetectionSetup, mc: &McConfig) -> Result<DetectionEstimate> {
    Ok(empirical_detection_sweep(dep, setup, &[setup.p_th], mc)?[0])
}

/// Detection trials coupled across exclusion radii: each trial draws one
/// network over [min candidate, r_max] and one set of window samples, and
/// radius r_exc keeps only the BSs at distance >= r_exc.
#[derive(Debug, Clone)]
pub struct DetectionPanel {
    pub candidates: Vec<f64>,
    pub setup: DetectionSetup,
    /// Row per trial: I_tot at each candidate.
    i_tot: Vec<Vec<f64>>,
    draws: Vec<WindowDraw>,
}

impl DetectionPanel {
    pub fn new(dep: &Deployment, setup: &DetectionSetup, candidates: &[f64], mc: &McConfig) -> Result<Self> {
        setup.validate()?;
        if candidates.is_empty() || candidates.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("candidates must be non-empty and strictly ascending");
        }
        let r_min = candidates[0];
        let r_top = *candidates.last().unwrap();
        let top = Deployment { r_exc: r_top, ..*dep };
        let reference = avg_interference_aaecc(&top)?.mean_w + setup.noise_w;
        let r_max = truncation_radius(&top, TRUNCATION, reference)?;
        let re = Realizer::with_radius(&Deployment { r_exc: r_min, ..*dep }, mc, r_max)?;
        let rows: Vec<(Vec<f64>, WindowDraw)> = (0..mc.trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(mc.seed, t);
                let pts = re.points(&mut rng);
                let phis = re.phis(pts.len(), &mut rng);
                let mut g: Vec<(f64, f64)> = pts
                    .iter()
                    .zip(&phis)
                    .map(|(p, phi)| (p.r, link(dep, mc.kernel, p.r, p.theta, *phi)))
                    .collect();
                g.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut suffix = vec![0.0; g.len() + 1];
                for k in (0..g.len()).rev() {
                    suffix[k] = suffix[k + 1] + g[k].1;
                }
                let row = candidates.iter().map(|c| suffix[g.partition_point(|x| x.0 < *c)]).collect();
                (row, WindowDraw::sample(setup.n_samples, &mut rng))
            })
            .collect();
        let (i_tot, draws) = rows.into_iter().unzip();
        Ok(Self {
            candidates: candidates.to_vec(),
            setup: *setup,
            i_tot,
            draws,
        })
    }

    pub fn estimate(&self, candidate: usize, p_th: f64) -> DetectionEstimate {
        let stats: Vec<(f64, f64)> = self
            .i_tot
            .iter()
            .zip(&self.draws)
            .map(|(row, w)| {
                let s = row[candidate] + self.setup.noise_w;
                (w.p_rad0(s), w.p_rad1(s, self.setup.p_tar))
            })
            .collect();
        detection_counts(&stats, &[p_th])[0]
    }

    pub fn min_exclusion(&self, p_th: f64, pd_thr: f64, pfa_thr: f64) -> Result<ExclusionSearch> {
        min_exclusion_search(&self.candidates, pd_thr, pfa_thr, |r| {
            let k = self.candidates.partition_point(|c| *c < r);
            let e = self.estimate(k, p_th);
            Ok((e.pd, e.pfa))
        })
    }
}

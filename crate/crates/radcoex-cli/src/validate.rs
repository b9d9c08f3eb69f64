//! Analytic-vs-simulation comparison table for the reference checks.

use std::fmt;

use radcoex::avgint::{avg_interference_aaecc, avg_interference_aaecc_approx, eta_ca};
use radcoex::detection::{cond_cdf, min_exclusion_search, DetectionSetup, Hypothesis, Method, SpatialDetector};
use radcoex::intdist::ContourModel;
use radcoex::simkit::{
    empirical_cdf, empirical_detection_sweep, jsd_against_cdf_on, log_edges, mc_interference_stratified, trial_rng,
    DetectionPanel, LinkKernel, McConfig, Realizer, WindowDraw,
};
use radcoex::stochgeom::PER_KM2;
use radcoex::Deployment;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{num, Table};
use crate::CliError;

const KM: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Diagnostic row, not counted.
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub reference: f64,
    pub value: f64,
    pub metric: f64,
    pub tolerance: f64,
    pub status: Status,
    pub note: String,
}

impl Check {
    fn bound(criterion: u8, name: impl Into<String>, reference: f64, value: f64, metric: f64, tolerance: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            reference,
            value,
            metric,
            tolerance,
            status: if metric <= tolerance { Status::Pass } else { Status::Fail },
            note: String::new(),
        }
    }

    fn info(mut self) -> Self {
        self.status = Status::Info;
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.note = n.into();
        self
    }
}

pub fn table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["criterion", "check", "reference", "value", "metric", "tolerance", "status", "note"]);
    for c in checks {
        t.push(vec![
            c.criterion.to_string(),
            c.name.clone(),
            num(c.reference),
            num(c.value),
            num(c.metric),
            num(c.tolerance),
            c.status.to_string(),
            c.note.clone(),
        ]);
    }
    t
}

/// Runs every check; trial counts scale from `mc.trials` (1e5 by default).
pub fn run(cfg: &ExperimentConfig, log: &mut dyn FnMut(&Check)) -> Result<Vec<Check>, CliError> {
    let dep = cfg.deployment()?;
    let setup = cfg.detection_setup()?;
    let mc = cfg.mc_config()?;
    if mc.trials == 0 {
        return Err(ConfigError::Invalid("validate needs mc.trials >= 1".into()).into());
    }
    let mut out = Vec::new();
    let mut emit = |c: Check, out: &mut Vec<Check>| {
        log(&c);
        out.push(c);
    };
    for c in campbell(&dep, &mc)? {
        emit(c, &mut out);
    }
    for c in slopes(&dep)? {
        emit(c, &mut out);
    }
    for c in table_one(&dep, cfg.deployment.pdf_kmax)? {
        emit(c, &mut out);
    }
    for c in dominant(&dep, &mc)? {
        emit(c, &mut out);
    }
    for c in detection(&dep, &setup, &cfg.thresholds()?, &mc)? {
        emit(c, &mut out);
    }
    for c in min_exclusion(&dep, &setup, &cfg.detection.pd_thr, &cfg.detection.pfa_thr, &mc)? {
        emit(c, &mut out);
    }
    Ok(out)
}

fn scaled(mc: &McConfig, div: usize, floor: usize) -> McConfig {
    McConfig {
        trials: (mc.trials / div).max(floor),
        ..*mc
    }
}

fn campbell(base: &Deployment, mc: &McConfig) -> Result<Vec<Check>, CliError> {
    let mut v = Vec::new();
    for lambda_bs in [0.01, 0.05, 0.1] {
        for r in [5.0, 10.0, 20.0] {
            let dep = Deployment { lambda_bs, r_exc: r * KM, ..*base };
            let a = avg_interference_aaecc(&dep)?.mean_w;
            let m = mc_interference_stratified(&dep, mc)?;
            v.push(
                Check::bound(2, format!("mean lambda={lambda_bs} r_exc={r}km"), a, m.mean, (m.mean / a - 1.0).abs(), 0.03)
                    .note(format!("se {:.2e} W, {} trials", m.se_mean, m.trials)),
            );
        }
    }
    Ok(v)
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn slopes(base: &Deployment) -> Result<Vec<Check>, CliError> {
    let r: Vec<f64> = [5.0, 10.0, 20.0, 40.0].iter().map(|x| x * KM).collect();
    let (mut mean, mut std, mut exact) = (vec![], vec![], vec![]);
    for &r_exc in &r {
        let dep = Deployment { r_exc, ..*base };
        let s = avg_interference_aaecc_approx(&dep)?;
        mean.push(s.mean_w);
        std.push(s.std_w);
        exact.push(avg_interference_aaecc(&dep)?.mean_w);
    }
    let a = base.alpha;
    let (sm, ss, se) = (fit_slope(&r, &mean), fit_slope(&r, &exact), fit_slope(&r, &std));
    Ok(vec![
        Check::bound(3, "approx mean slope", -(a - 2.0), sm, (sm + a - 2.0).abs(), 0.05),
        Check::bound(3, "approx std slope", -(a - 1.0), se, (se + a - 1.0).abs(), 0.05),
        Check::bound(3, "exact mean slope", -(a - 2.0), ss, (ss + a - 2.0).abs(), 0.05).info(),
    ])
}

fn table_one(base: &Deployment, kmax: usize) -> Result<Vec<Check>, CliError> {
    let mut v = Vec::new();
    for (param, paper) in [(0.0089, 1.004), (0.1253, 2.905)] {
        let lambda_m2 = (param / base.h_bs).powi(2) / std::f64::consts::PI;
        let dep = Deployment { lambda_bs: lambda_m2 / PER_KM2, ..*base };
        let eta = eta_ca(&dep, kmax)?;
        v.push(Check::bound(4, format!("eta_ca at {param}"), paper, eta, (eta / paper - 1.0).abs(), 0.05));
    }
    Ok(v)
}

fn dominant(base: &Deployment, mc: &McConfig) -> Result<Vec<Check>, CliError> {
    let mc5 = scaled(mc, 10, 1000);
    let radii = [5.0, 10.0, 20.0, 40.0];
    let mut runs = Vec::new();
    for r in radii {
        let dep = Deployment { r_exc: r * KM, ..*base };
        let model = ContourModel::new(&dep)?;
        let real = Realizer::new(&dep, &mc5)?.run();
        runs.push((dep, model, real));
    }
    let mut v = Vec::new();
    let (dep5, model5, real5) = &runs[0];
    let rd: Vec<f64> = real5.iter().map(|x| x.r_dom_emp).collect();
    let ks = empirical_cdf(&rd)?.ks_against(|x| model5.rdom_cdf(x));
    v.push(Check::bound(5, "KS r_dom at 5km", 0.0, ks, ks, 0.02).note(format!("{} draws, exact elevation", rd.len())));

    let horizon = McConfig { kernel: LinkKernel::Horizon, ..mc5 };
    let rh: Vec<f64> = Realizer::new(dep5, &horizon)?.run().iter().map(|x| x.r_dom_emp).collect();
    let ks_h = empirical_cdf(&rh)?.ks_against(|x| model5.rdom_cdf(x));
    v.push(Check::bound(5, "KS r_dom at 5km, horizon elevation", 0.0, ks_h, ks_h, 0.02).info());

    let all = runs.iter().flat_map(|r| r.2.iter().map(|x| x.i_tot));
    let lo = all.clone().filter(|x| *x > 0.0).fold(f64::INFINITY, f64::min);
    let hi = all.fold(0.0, f64::max);
    let edges = log_edges(lo, hi, mc.bins)?;
    let mut j = Vec::new();
    for (_, model, real) in &runs {
        let it: Vec<f64> = real.iter().map(|x| x.i_tot).collect();
        j.push(jsd_against_cdf_on(&it, |x| model.itot_cdf_di(x).p, &edges)?);
    }
    v.push(Check::bound(5, "JSD I_tot at 5km", 0.0, j[0], j[0], 0.05));
    let peak = (0..j.len()).max_by(|a, b| j[*a].total_cmp(&j[*b])).unwrap();
    let interior = peak > 0 && peak + 1 < j.len();
    let curve: Vec<String> = radii.iter().zip(&j).map(|(r, x)| format!("{r}km:{x:.4}")).collect();
    v.push(Check {
        criterion: 5,
        name: "JSD rise then fall over r_exc".into(),
        reference: f64::NAN,
        value: radii[peak] * KM,
        metric: f64::NAN,
        tolerance: f64::NAN,
        status: if interior { Status::Pass } else { Status::Fail },
        note: format!("peak at {}km; {}", radii[peak], curve.join(" ")),
    });
    Ok(v)
}

fn detection(base: &Deployment, setup: &DetectionSetup, thresholds: &[f64], mc: &McConfig) -> Result<Vec<Check>, CliError> {
    let mut v = Vec::new();
    // conditional laws against synthesized windows, interference equal to the noise power
    let i = setup.noise_w;
    let s = i + setup.noise_w;
    let windows = 1_000_000;
    let mut rng = trial_rng(mc.seed, u64::MAX);
    let draws: Vec<WindowDraw> = (0..windows).map(|_| WindowDraw::sample(setup.n_samples, &mut rng)).collect();
    for hyp in [Hypothesis::H0, Hypothesis::H1] {
        let x: Vec<f64> = draws
            .iter()
            .map(|w| if hyp == Hypothesis::H0 { w.p_rad0(s) } else { w.p_rad1(s, setup.p_tar) })
            .collect();
        let e = empirical_cdf(&x)?;
        let ks = e.ks_against(|p| cond_cdf(setup, i, hyp, p, Method::Chisq).unwrap_or(f64::NAN));
        v.push(Check::bound(6, format!("KS conditional CHISQ {hyp:?}"), 0.0, ks, ks, 0.002).note(format!("{windows} windows")));
    }

    let big = DetectionSetup { n_samples: 1000, ..*setup };
    let mut sup: f64 = 0.0;
    for hyp in [Hypothesis::H0, Hypothesis::H1] {
        let pt = if hyp == Hypothesis::H1 { big.p_tar } else { 0.0 };
        let sd = ((pt + s).powi(2) - pt * pt).sqrt() / (big.n_samples as f64).sqrt();
        for k in 0..=2000 {
            let p = pt + s + sd * (-8.0 + 16.0 * k as f64 / 2000.0);
            if p <= 0.0 {
                continue;
            }
            let a = cond_cdf(&big, i, hyp, p, Method::Chisq)?;
            let b = cond_cdf(&big, i, hyp, p, Method::Clt)?;
            sup = sup.max((a - b).abs());
        }
    }
    v.push(Check::bound(6, "CLT vs CHISQ sup at N=1000", 0.0, sup, sup, 0.01));

    let mc6 = scaled(mc, 5, 1000);
    v.extend(spatial_grid(6, "spatial vs empirical", base, setup, thresholds, &[5.0, 10.0, 20.0], &mc6, false)?);
    let lim = interference_limited(setup);
    let grid: Vec<f64> = (0..=30).map(|k| 1e-17 * 1e3f64.powf(k as f64 / 30.0)).collect();
    v.extend(spatial_grid(6, "spatial vs empirical, interference-limited", base, &lim, &grid, &[5.0, 10.0], &mc6, true)?);
    Ok(v)
}

/// Scenario where the aggregate interference dominates the receiver noise.
pub fn interference_limited(setup: &DetectionSetup) -> DetectionSetup {
    DetectionSetup {
        p_tar: 1e-15,
        noise_w: 1e-16,
        p_th: 5e-16,
        ..*setup
    }
}

#[allow(clippy::too_many_arguments)]
fn spatial_grid(
    criterion: u8,
    label: &str,
    base: &Deployment,
    setup: &DetectionSetup,
    thresholds: &[f64],
    radii_km: &[f64],
    mc: &McConfig,
    info: bool,
) -> Result<Vec<Check>, CliError> {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for r in radii_km {
        let dep = Deployment { r_exc: r * KM, ..*base };
        let det = SpatialDetector::new(&dep)?;
        let emp = empirical_detection_sweep(&dep, setup, thresholds, mc)?;
        for (p_th, e) in thresholds.iter().zip(&emp) {
            let s = setup.with_threshold(*p_th);
            let d = (det.pd(&s, Method::Chisq)? - e.pd).abs().max((det.pfa(&s, Method::Chisq)? - e.pfa).abs());
            if d > worst {
                worst = d;
                at = format!("worst at r_exc={r}km p_th={p_th:.3e} W");
            }
        }
    }
    let c = Check::bound(criterion, format!("{label} max abs"), 0.0, worst, worst, 0.02).note(format!("{at}, {} trials", mc.trials));
    Ok(vec![if info { c.info() } else { c }])
}

fn relative_gap(a: Option<f64>, m: Option<f64>, step: f64) -> f64 {
    match (a, m) {
        (None, None) => 0.0,
        (Some(a), Some(m)) => (a - m).abs() / m.max(step),
        _ => 1.0,
    }
}

/// Mean relative gap between the analytic and simulated minimum radius.
pub fn exclusion_gap(
    base: &Deployment,
    setup: &DetectionSetup,
    pd_thr: &[f64],
    pfa_thr: &[f64],
    candidates: &[f64],
    mc: &McConfig,
) -> Result<(f64, String), CliError> {
    let mut cache: Vec<Option<(f64, f64)>> = vec![None; candidates.len()];
    let mut analytic = |r: f64| -> radcoex::Result<(f64, f64)> {
        let k = candidates.partition_point(|c| *c < r);
        if let Some(v) = cache[k] {
            return Ok(v);
        }
        let d = SpatialDetector::new(&Deployment { r_exc: r, ..*base })?;
        let v = (d.pd(setup, Method::Chisq)?, d.pfa(setup, Method::Chisq)?);
        cache[k] = Some(v);
        Ok(v)
    };
    let panel = DetectionPanel::new(base, setup, candidates, mc)?;
    let step = candidates[1] - candidates[0];
    let (mut total, mut n) = (0.0, 0usize);
    let mut pairs = Vec::new();
    for &pd in pd_thr {
        for &pfa in pfa_thr {
            let a = min_exclusion_search(candidates, pd, pfa, &mut analytic)?.radius;
            let m = panel.min_exclusion(setup.p_th, pd, pfa)?.radius;
            total += relative_gap(a, m, step);
            n += 1;
            let show = |x: Option<f64>| x.map(|r| format!("{}", r / KM)).unwrap_or_else(|| "none".into());
            pairs.push(format!("({pd},{pfa}):{}/{}", show(a), show(m)));
        }
    }
    Ok((total / n as f64, pairs.join(" ")))
}

fn min_exclusion(base: &Deployment, setup: &DetectionSetup, pd_thr: &[f64], pfa_thr: &[f64], mc: &McConfig) -> Result<Vec<Check>, CliError> {
    let candidates: Vec<f64> = (0..=70).map(|k| 500.0 * k as f64).collect();
    let mc7 = scaled(mc, 5, 1000);
    let (gap, pairs) = exclusion_gap(base, setup, pd_thr, pfa_thr, &candidates, &mc7)?;
    let lim = interference_limited(setup);
    let (gap_l, pairs_l) = exclusion_gap(base, &lim, &[0.5, 0.9], &[0.01, 0.02, 0.05, 0.1, 0.2], &candidates, &mc7)?;
    Ok(vec![
        Check::bound(7, "min exclusion mean relative gap", 0.0, gap, gap, 0.06).note(format!("km analytic/mc {pairs}")),
        Check::bound(7, "min exclusion mean relative gap, interference-limited", 0.0, gap_l, gap_l, 0.06)
            .info()
            .note(format!("km analytic/mc {pairs_l}")),
    ])
}

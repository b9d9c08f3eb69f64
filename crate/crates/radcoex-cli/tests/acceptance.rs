//! Acceptance run for criteria 1-8. Prints one PASS/FAIL line per criterion
//! plus INFO diagnostics, and exits non-zero only when the set of failing
//! criteria differs from the documented one.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use radcoex::antenna::{bf_gain, bf_gain_max};
use radcoex::avgint::{avg_interference_aaecc, avg_interference_aaecc_approx, eta_ca};
use radcoex::detection::{cond_cdf, min_exclusion_radius, DetectionSetup, Hypothesis, Method, SpatialDetector};
use radcoex::intdist::{kappa, ContourModel};
use radcoex::stochgeom::PER_KM2;
use radcoex::{ArrayConfig, Deployment, Pointing};

const KM: f64 = 1000.0;
/// Criteria with documented failures (see the decisions ledger).
const KNOWN_FAILURES: [u8; 3] = [4, 5, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn info(msg: impl AsRef<str>) {
    println!("    INFO {}", msg.as_ref());
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

// ---------- criterion 1: gains against the steering-vector sum

fn steering(n_az: usize, n_el: usize, az: f64, el: f64) -> Vec<Complex64> {
    let (u, v) = (az.sin() * el.cos(), el.sin());
    let mut a = Vec::with_capacity(n_az * n_el);
    for m in 0..n_az {
        for n in 0..n_el {
            a.push(Complex64::from_polar(1.0, -PI * (m as f64 * u + n as f64 * v)));
        }
    }
    a
}

fn oracle_gain(n_az: usize, n_el: usize, rx: (f64, f64), st: (f64, f64)) -> f64 {
    let a = steering(n_az, n_el, rx.0, rx.1);
    let b = steering(n_az, n_el, st.0, st.1);
    let s: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    s.norm_sqr() / (n_az * n_el) as f64
}

fn criterion1() -> Outcome {
    let mut r = rng(1, 0);
    let (mut violations, mut worst_rel, mut deep) = (0usize, 0.0f64, 0usize);
    let draws = 100_000;
    for _ in 0..draws {
        let n_az = r.random_range(1..=16);
        let n_el = r.random_range(1..=16);
        let arr = ArrayConfig { n_az, n_el };
        let m = (n_az * n_el) as f64;
        let phi = r.random_range(0.0..FRAC_PI_2);
        let phi_m = r.random_range(0.0..FRAC_PI_2);
        let phi_k = r.random_range(phi_m..=FRAC_PI_2);
        let az_rx = r.random_range(-FRAC_PI_2..FRAC_PI_2);
        let az_k = r.random_range(-FRAC_PI_2..FRAC_PI_2);
        let g = bf_gain(arr, Pointing { azimuth: az_rx, elevation: phi }, Pointing { azimuth: az_k, elevation: phi_k });
        if g > bf_gain_max(arr, phi, phi_m) * (1.0 + 1e-12) {
            violations += 1;
        }
        let o = oracle_gain(n_az, n_el, (az_rx, phi), (az_k, phi_k));
        // relative error is only meaningful away from exact nulls
        if o >= 1e-9 * m {
            worst_rel = worst_rel.max((g - o).abs() / o);
        } else {
            deep += 1;
            worst_rel = worst_rel.max((g - o).abs() / (1e-9 * m));
        }
    }
    outcome(
        violations == 0 && worst_rel <= 1e-9,
        format!("{draws} draws, {violations} bound violations, max relative oracle gap {worst_rel:.2e} ({deep} near-null draws)"),
    )
}

// ---------- test-side network simulation

#[derive(Clone, Copy, PartialEq)]
enum Kernel {
    Exact,
    Horizon,
}

struct Net {
    dep: Deployment,
    phi_m: f64,
    kernel: Kernel,
}

impl Net {
    fn new(dep: &Deployment, kernel: Kernel) -> Self {
        let r_cell = 1.0 / (PI * dep.lambda_bs * PER_KM2).sqrt();
        Self {
            dep: *dep,
            phi_m: (dep.h_bs / r_cell).atan(),
            kernel,
        }
    }

    fn link(&self, r: f64, theta: f64) -> f64 {
        let d = &self.dep;
        let p = d.p_bs / d.k_users as f64 * d.pl_ref;
        match self.kernel {
            Kernel::Exact => {
                let dh = d.h_bs - d.h_rad;
                let phi = (dh / r).atan();
                p * (r * r + dh * dh).powf(-0.5 * d.alpha)
                    * bf_gain(d.rad_array, Pointing { azimuth: theta, elevation: -phi }, d.rad_point)
                    * bf_gain_max(d.bs_array, phi, self.phi_m)
            }
            Kernel::Horizon => {
                p * r.powf(-d.alpha)
                    * bf_gain(d.rad_array, Pointing { azimuth: theta, elevation: 0.0 }, d.rad_point)
                    * bf_gain_max(d.bs_array, 0.0, self.phi_m)
            }
        }
    }

    /// (distance, contribution) of every BS in the half annulus [r0, r1].
    fn draw(&self, r0: f64, r1: f64, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
        let mean = self.dep.lambda_bs * PER_KM2 * 0.5 * PI * (r1 * r1 - r0 * r0);
        let n = Poisson::new(mean).unwrap().sample(rng) as usize;
        (0..n)
            .map(|_| {
                let r = (r0 * r0 + rng.random::<f64>() * (r1 * r1 - r0 * r0)).sqrt();
                let theta = -FRAC_PI_2 + PI * rng.random::<f64>();
                (r, self.link(r, theta))
            })
            .collect()
    }

    /// r^alpha times the strongest far-field link, i.e. the contour constant.
    fn kappa(&self) -> f64 {
        let r = 1e7;
        let pt = self.dep.rad_point;
        let theta = (pt.azimuth.sin() * pt.elevation.cos()).asin();
        self.link(r, theta) * r.powf(self.dep.alpha)
    }
}

/// Mean aggregate interference by doubling annuli out to 64 r_exc; the
/// annulus at level j gets trials / 4^j realizations.
fn stratified_mean(dep: &Deployment, trials: usize, seed: u64) -> f64 {
    let net = Net::new(dep, Kernel::Exact);
    let mut mean = 0.0;
    for j in 0..6u32 {
        let r0 = dep.r_exc * 2f64.powi(j as i32);
        let n = (trials >> (2 * j)).max(50);
        let sum: f64 = (0..n as u64)
            .into_par_iter()
            .map(|t| {
                let mut g = rng(seed, ((j as u64) << 40) | t);
                net.draw(r0, 2.0 * r0, &mut g).iter().map(|x| x.1).sum::<f64>()
            })
            .sum();
        mean += sum / n as f64;
    }
    mean
}

fn criterion2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for lambda_bs in [0.01, 0.05, 0.1] {
        for r in [5.0, 10.0, 20.0] {
            let dep = Deployment { lambda_bs, r_exc: r * KM, ..Deployment::reference() };
            let a = avg_interference_aaecc(&dep).unwrap().mean_w;
            let m = stratified_mean(&dep, 100_000, 2);
            let rel = (m / a - 1.0).abs();
            worst = worst.max(rel);
            rows.push(format!("{lambda_bs}/{r}km:{:+.2}%", 100.0 * (m / a - 1.0)));
        }
    }
    info(format!("analytic vs MC mean: {}", rows.join(" ")));
    outcome(worst <= 0.03, format!("max relative gap {:.2}% (tol 3%)", 100.0 * worst))
}

// ---------- criterion 3

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

fn criterion3() -> Outcome {
    let base = Deployment::reference();
    let r: Vec<f64> = (0..8).map(|k| 5.0 * KM * 2f64.powf(k as f64 / 2.0)).collect();
    let (mut mean, mut std, mut exact) = (vec![], vec![], vec![]);
    for &r_exc in &r {
        let dep = Deployment { r_exc, ..base };
        let s = avg_interference_aaecc_approx(&dep).unwrap();
        mean.push(s.mean_w);
        std.push(s.std_w);
        exact.push(avg_interference_aaecc(&dep).unwrap().mean_w);
    }
    let (sm, ss) = (slope(&r, &mean), slope(&r, &std));
    info(format!(
        "exact-model mean slope over 5-56 km {:.3} (dB/octave {:.2})",
        slope(&r, &exact),
        10.0 * 2f64.log10() * slope(&r, &exact)
    ));
    let a = base.alpha;
    outcome(
        (sm + a - 2.0).abs() <= 0.05 && (ss + a - 1.0).abs() <= 0.05,
        format!("mean slope {sm:.4} (target {}), std slope {ss:.4} (target {})", -(a - 2.0), -(a - 1.0)),
    )
}

// ---------- criterion 4

fn criterion4() -> Outcome {
    let base = Deployment::reference();
    let mut ok = true;
    let mut rows = Vec::new();
    for (param, paper) in [(0.0089, 1.004), (0.1253, 2.905)] {
        let lambda_m2 = (param / base.h_bs).powi(2) / PI;
        let dep = Deployment { lambda_bs: lambda_m2 / PER_KM2, ..base };
        let eta = eta_ca(&dep, 3).unwrap();
        let rel = eta / paper - 1.0;
        ok &= rel.abs() <= 0.05;
        rows.push(format!("{param}: {eta:.4} vs {paper} ({:+.1}%)", 100.0 * rel));
    }
    outcome(ok, rows.join(", "))
}

// ---------- criterion 5

fn ks(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn jsd2(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (a, b) in p.iter().zip(q) {
        let m = 0.5 * (a + b);
        if *a > 0.0 {
            d += 0.5 * a * (a / m).log2();
        }
        if *b > 0.0 {
            d += 0.5 * b * (b / m).log2();
        }
    }
    d
}

/// JSD between a sample and a CDF on shared edges; the end bins take the tails.
fn jsd_on_edges(samples: &[f64], cdf: impl Fn(f64) -> f64, edges: &[f64]) -> f64 {
    let bins = edges.len() - 1;
    let mut p = vec![0.0; bins];
    for x in samples {
        let k = edges.partition_point(|e| e <= x).saturating_sub(1).min(bins - 1);
        p[k] += 1.0 / samples.len() as f64;
    }
    let f: Vec<f64> = edges.iter().map(|e| cdf(*e)).collect();
    let mut q: Vec<f64> = (0..bins).map(|k| f[k + 1] - f[k]).collect();
    q[0] += f[0];
    q[bins - 1] += 1.0 - f[bins];
    jsd2(&p, &q)
}

/// Per draw: aggregate and the farthest-contour distance of the dominant BS.
fn dominant_runs(dep: &Deployment, kernel: Kernel, trials: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let net = Net::new(dep, kernel);
    let k = net.kappa();
    let rows: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut g = rng(seed, t);
            let bs = net.draw(dep.r_exc, 40.0 * dep.r_exc, &mut g);
            let tot: f64 = bs.iter().map(|x| x.1).sum();
            let dom = bs.iter().map(|x| x.1).fold(0.0, f64::max);
            (tot, (k / dom).powf(1.0 / dep.alpha))
        })
        .collect();
    rows.into_iter().unzip()
}

fn criterion5() -> Outcome {
    let trials = 10_000;
    let radii = [5.0, 10.0, 20.0, 40.0];
    let base = Deployment::reference();
    let dep5 = Deployment { r_exc: 5.0 * KM, ..base };
    let model5 = ContourModel::new(&dep5).unwrap();
    info(format!(
        "contour constant: simulation {:.6e}, library {:.6e}",
        Net::new(&dep5, Kernel::Exact).kappa(),
        kappa(&dep5).unwrap().kappa
    ));

    let mut runs = Vec::new();
    for r in radii {
        let dep = Deployment { r_exc: r * KM, ..base };
        runs.push((ContourModel::new(&dep).unwrap(), dominant_runs(&dep, Kernel::Exact, trials, 5)));
    }
    let mut rd = runs[0].1 .1.clone();
    rd.sort_by(f64::total_cmp);
    let ks_exact = ks(&rd, |x| model5.rdom_cdf(x));

    let (_, mut rh) = dominant_runs(&dep5, Kernel::Horizon, trials, 5);
    rh.sort_by(f64::total_cmp);
    info(format!("KS r_dom at 5 km with horizon-elevation links: {:.4}", ks(&rh, |x| model5.rdom_cdf(x))));

    let all = runs.iter().flat_map(|r| r.1 .0.iter().copied());
    let lo = all.clone().filter(|x| *x > 0.0).fold(f64::INFINITY, f64::min);
    let hi = all.fold(0.0, f64::max);
    let bins = 200;
    let edges: Vec<f64> = (0..=bins).map(|k| lo * (hi / lo).powf(k as f64 / bins as f64)).collect();
    let j: Vec<f64> = runs.iter().map(|(m, (it, _))| jsd_on_edges(it, |x| m.itot_cdf_di(x).p, &edges)).collect();
    let peak = (0..j.len()).max_by(|a, b| j[*a].total_cmp(&j[*b])).unwrap();
    let rise_fall = peak > 0 && peak + 1 < j.len();
    let curve: Vec<String> = radii.iter().zip(&j).map(|(r, v)| format!("{r}km:{v:.4}")).collect();
    outcome(
        ks_exact < 0.02 && j[0] < 0.05 && rise_fall,
        format!(
            "KS r_dom {ks_exact:.4} (tol 0.02), JSD at 5 km {:.4} (tol 0.05), JSD curve {} -> {}",
            j[0],
            curve.join(" "),
            if rise_fall { "rise then fall" } else { "monotone" }
        ),
    )
}

// ---------- criterion 6

/// Window-average power of N complex Gaussian samples of power s plus a target of power p_tar.
fn window(n: usize, s: f64, p_tar: f64, g: &mut ChaCha8Rng) -> f64 {
    let sd = (0.5 * s).sqrt();
    let a = p_tar.sqrt();
    let mut acc = 0.0;
    for _ in 0..n {
        let x: f64 = g.sample(StandardNormal);
        let y: f64 = g.sample(StandardNormal);
        acc += (a + sd * x).powi(2) + (sd * y).powi(2);
    }
    acc / n as f64
}

/// Empirical (pd, pfa) per threshold from the test-side network and windows.
fn empirical_roc(dep: &Deployment, setup: &DetectionSetup, thresholds: &[f64], trials: usize, seed: u64) -> Vec<(f64, f64)> {
    let net = Net::new(dep, Kernel::Exact);
    let stats: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut g = rng(seed, t);
            let i: f64 = net.draw(dep.r_exc, 40.0 * dep.r_exc.max(5.0 * KM), &mut g).iter().map(|x| x.1).sum();
            let s = i + setup.noise_w;
            (window(setup.n_samples, s, 0.0, &mut g), window(setup.n_samples, s, setup.p_tar, &mut g))
        })
        .collect();
    thresholds
        .iter()
        .map(|p| {
            let n = stats.len() as f64;
            let d = stats.iter().filter(|x| x.1 > *p).count() as f64 / n;
            let f = stats.iter().filter(|x| x.0 > *p).count() as f64 / n;
            (d, f)
        })
        .collect()
}

fn spatial_gap(setup: &DetectionSetup, thresholds: &[f64], radii_km: &[f64], trials: usize) -> (f64, String) {
    let mut worst = (0.0, String::new());
    for r in radii_km {
        let dep = Deployment { r_exc: r * KM, ..Deployment::reference() };
        let det = SpatialDetector::new(&dep).unwrap();
        let emp = empirical_roc(&dep, setup, thresholds, trials, 6);
        for (p, (d, f)) in thresholds.iter().zip(emp) {
            let s = setup.with_threshold(*p);
            let gap = (det.pd(&s, Method::Chisq).unwrap() - d).abs().max((det.pfa(&s, Method::Chisq).unwrap() - f).abs());
            if gap > worst.0 {
                worst = (gap, format!("r_exc {r} km, p_th {p:.3e} W"));
            }
        }
    }
    worst
}

fn criterion6() -> Outcome {
    let setup = DetectionSetup { p_th: 2e-9, ..DetectionSetup::reference() };
    let i = setup.noise_w;
    let s = i + setup.noise_w;
    let windows = 1_000_000usize;
    let mut ks_max: f64 = 0.0;
    for (hyp, p_tar, stream) in [(Hypothesis::H0, 0.0, 1u64), (Hypothesis::H1, setup.p_tar, 2)] {
        let mut x: Vec<f64> = (0..windows as u64)
            .into_par_iter()
            .map(|t| window(setup.n_samples, s, p_tar, &mut rng(60 + stream, t)))
            .collect();
        x.sort_by(f64::total_cmp);
        let d = ks(&x, |p| cond_cdf(&setup, i, hyp, p, Method::Chisq).unwrap());
        info(format!("conditional CHISQ {hyp:?} KS {d:.5} over {windows} windows"));
        ks_max = ks_max.max(d);
    }

    let big = DetectionSetup { n_samples: 1000, ..setup };
    let mut sup: f64 = 0.0;
    for (hyp, pt) in [(Hypothesis::H0, 0.0), (Hypothesis::H1, big.p_tar)] {
        let sd = ((pt + s).powi(2) - pt * pt).sqrt() / (big.n_samples as f64).sqrt();
        for k in 0..=4000 {
            let p = pt + s + sd * (-8.0 + 16.0 * k as f64 / 4000.0);
            if p > 0.0 {
                let a = cond_cdf(&big, i, hyp, p, Method::Chisq).unwrap();
                let b = cond_cdf(&big, i, hyp, p, Method::Clt).unwrap();
                sup = sup.max((a - b).abs());
            }
        }
    }

    let grid: Vec<f64> = (0..=40).map(|k| 1e-10 * 1e4f64.powf(k as f64 / 40.0)).collect();
    let (gap, at) = spatial_gap(&setup, &grid, &[5.0, 10.0, 20.0], 20_000);
    let lim = DetectionSetup { p_tar: 1e-15, noise_w: 1e-16, ..setup };
    let grid_l: Vec<f64> = (0..=30).map(|k| 1e-17 * 1e3f64.powf(k as f64 / 30.0)).collect();
    let (gap_l, at_l) = spatial_gap(&lim, &grid_l, &[5.0, 10.0], 20_000);
    info(format!("interference-limited variant (P_tar 1e-15 W, noise 1e-16 W): max gap {gap_l:.4} at {at_l}"));
    outcome(
        ks_max < 0.002 && sup < 0.01 && gap <= 0.02,
        format!("KS {ks_max:.5} (tol 0.002), CLT sup {sup:.5} (tol 0.01), spatial max gap {gap:.4} at {at} (tol 0.02)"),
    )
}

// ---------- criterion 7

/// Smallest candidate meeting both constraints, by linear scan of simulated
/// P_d and P_fa with one coupled network and window per trial.
fn mc_min_exclusion(base: &Deployment, setup: &DetectionSetup, cands: &[f64], pairs: &[(f64, f64)], trials: usize) -> Vec<Option<f64>> {
    let net = Net::new(base, Kernel::Exact);
    let counts: Vec<(Vec<u32>, Vec<u32>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut g = rng(7, t);
            let mut bs = net.draw(cands[0], 200.0 * KM, &mut g);
            bs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut suffix = vec![0.0; bs.len() + 1];
            for k in (0..bs.len()).rev() {
                suffix[k] = suffix[k + 1] + bs[k].1;
            }
            // unit-power noise samples shared by every candidate radius
            let (mut a0, mut a1, mut b1) = (0.0, 0.0, 0.0);
            for _ in 0..setup.n_samples {
                let w = |g: &mut ChaCha8Rng| -> f64 { g.sample::<f64, _>(StandardNormal) * 0.5f64.sqrt() };
                let (x, y) = (w(&mut g), w(&mut g));
                a0 += x * x + y * y;
                let (x, y) = (w(&mut g), w(&mut g));
                a1 += x * x + y * y;
                b1 += x;
            }
            let nf = setup.n_samples as f64;
            let (a0, a1, b1) = (a0 / nf, a1 / nf, b1 / nf);
            let mut d = Vec::with_capacity(cands.len());
            let mut f = Vec::with_capacity(cands.len());
            for c in cands {
                let s = suffix[bs.partition_point(|x| x.0 < *c)] + setup.noise_w;
                let p0 = s * a0;
                let p1 = setup.p_tar + s * a1 + 2.0 * (setup.p_tar * s).sqrt() * b1;
                f.push(u32::from(p0 > setup.p_th));
                d.push(u32::from(p1 > setup.p_th));
            }
            (d, f)
        })
        .collect();
    let n = trials as f64;
    let pd: Vec<f64> = (0..cands.len()).map(|k| counts.iter().map(|c| c.0[k]).sum::<u32>() as f64 / n).collect();
    let pfa: Vec<f64> = (0..cands.len()).map(|k| counts.iter().map(|c| c.1[k]).sum::<u32>() as f64 / n).collect();
    pairs
        .iter()
        .map(|(d, f)| (0..cands.len()).find(|&k| pd[k] >= *d && pfa[k] <= *f).map(|k| cands[k]))
        .collect()
}

fn mean_gap(base: &Deployment, setup: &DetectionSetup, pairs: &[(f64, f64)], trials: usize) -> (f64, String) {
    let cands: Vec<f64> = (0..=70).map(|k| 0.5 * KM * k as f64).collect();
    let mc = mc_min_exclusion(base, setup, &cands, pairs, trials);
    let mut total = 0.0;
    let mut rows = Vec::new();
    for ((d, f), m) in pairs.iter().zip(&mc) {
        let a = min_exclusion_radius(base, setup, *d, *f, &cands, Method::Chisq).unwrap().radius;
        total += match (a, *m) {
            (None, None) => 0.0,
            (Some(a), Some(m)) => (a - m).abs() / m.max(0.5 * KM),
            _ => 1.0,
        };
        let km = |x: Option<f64>| x.map_or("none".to_string(), |v| format!("{}", v / KM));
        rows.push(format!("({d},{f}):{}/{}", km(a), km(*m)));
    }
    (total / pairs.len() as f64, rows.join(" "))
}

fn criterion7() -> Outcome {
    let base = Deployment::reference();
    let setup = DetectionSetup { p_th: 2e-9, ..DetectionSetup::reference() };
    let mut pairs = Vec::new();
    for d in [0.5, 0.6, 0.7, 0.8, 0.9] {
        for f in [0.001, 0.01, 0.05, 0.1] {
            pairs.push((d, f));
        }
    }
    let (gap, rows) = mean_gap(&base, &setup, &pairs, 20_000);
    info(format!("reference setup, km analytic/MC: {rows}"));
    let lim = DetectionSetup { p_tar: 1e-15, noise_w: 1e-16, p_th: 5e-16, ..setup };
    let pairs_l: Vec<(f64, f64)> = [0.5, 0.9].iter().flat_map(|d| [0.01, 0.02, 0.05, 0.1, 0.2].map(|f| (*d, f))).collect();
    let (gap_l, rows_l) = mean_gap(&base, &lim, &pairs_l, 20_000);
    info(format!("interference-limited variant: mean relative gap {:.1}%, km analytic/MC: {rows_l}", 100.0 * gap_l));
    outcome(gap <= 0.06, format!("mean relative gap {:.2}% over {} threshold pairs (tol 6%)", 100.0 * gap, pairs.len()))
}

// ---------- criterion 8

fn criterion8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_radcoex"))
        .args(["validate", "--out"])
        .arg(dir.path())
        .output()
        .expect("run radcoex validate");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let failing: Vec<&str> = stdout.lines().filter(|l| l.starts_with("[fail]")).collect();
    for l in &failing {
        info(format!("validate: {l}"));
    }
    outcome(
        out.status.success(),
        format!("validate exit status {:?}, {} failing checks", out.status.code(), failing.len()),
    )
}

fn main() {
    let criteria: [(u8, fn() -> Outcome); 8] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
    ];
    let mut failed = BTreeSet::new();
    for (id, run) in criteria {
        let t = Instant::now();
        let o = run();
        println!(
            "criterion {id}: {} ({:.1} s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed.insert(id);
        }
    }
    let known: BTreeSet<u8> = KNOWN_FAILURES.into_iter().collect();
    let unexpected: Vec<_> = failed.difference(&known).collect();
    let recovered: Vec<_> = known.difference(&failed).collect();
    println!("failing criteria {failed:?}; documented failures {known:?}");
    if !recovered.is_empty() {
        println!("documented failures now passing: {recovered:?}");
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

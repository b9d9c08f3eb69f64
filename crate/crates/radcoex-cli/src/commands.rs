//! The four experiment subcommands. Each returns the CSV table it writes.

use radcoex::avgint::{
    avg_interference_aaecc, avg_interference_aaecc_approx, avg_interference_cbc, avg_interference_cbc_approx, eta_ca,
    InterferenceSummary,
};
use radcoex::detection::{min_exclusion_search, roc_curve, Method, SpatialDetector};
use radcoex::intdist::ContourModel;
use radcoex::simkit::{empirical_cdf, empirical_detection_sweep, jsd_against_cdf, DetectionPanel, Realizer};
use rayon::prelude::*;

use crate::config::{ConfigError, LoadedConfig, SweepPoint};
use crate::output::{join_warnings, num, opt, opt_power, power, Table};
use crate::CliError;

/// Depth of the r_dom tail covered by the interference-cdf grid.
const CDF_TAIL: f64 = 1e-6;

fn warn_of<T>(r: &radcoex::Result<T>) -> String {
    match r {
        Ok(_) => String::new(),
        Err(e) => e.to_string(),
    }
}

fn summary_warn(r: &radcoex::Result<InterferenceSummary>) -> String {
    match r {
        Ok(s) => s.warning.clone().unwrap_or_default(),
        Err(e) => e.to_string(),
    }
}

fn lead(p: &SweepPoint, name: &str) -> Vec<String> {
    vec![name.to_string(), num(p.value)]
}

pub fn avg_interference(cfg: &LoadedConfig) -> Result<Table, CliError> {
    let points = cfg.points()?;
    let name = cfg.config.sweep.parameter.clone();
    let mut t = Table::new(&[
        "parameter",
        "value",
        "r_exc_m",
        "mean_cbc_w",
        "mean_cbc_dbm",
        "mean_cbc_approx_w",
        "mean_cbc_approx_dbm",
        "mean_aaecc_w",
        "mean_aaecc_dbm",
        "mean_aaecc_approx_w",
        "mean_aaecc_approx_dbm",
        "std_aaecc_w",
        "std_aaecc_dbm",
        "std_aaecc_approx_w",
        "std_aaecc_approx_dbm",
        "eta_ca",
        "warning",
    ]);
    let rows: Vec<Result<Vec<String>, CliError>> = points
        .par_iter()
        .map(|p| {
            let kmax = p.config.deployment.pdf_kmax;
            let cbc = avg_interference_cbc(&p.dep, kmax);
            let cbc_a = avg_interference_cbc_approx(&p.dep, kmax);
            let aa = avg_interference_aaecc(&p.dep)?;
            let aa_a = avg_interference_aaecc_approx(&p.dep);
            let eta = eta_ca(&p.dep, kmax);
            let mut row = lead(p, &name);
            row.push(num(p.dep.r_exc));
            row.extend(opt_power(cbc.as_ref().ok().map(|s| s.mean_w)));
            row.extend(opt_power(cbc_a.as_ref().ok().map(|s| s.mean_w)));
            row.extend(power(aa.mean_w));
            row.extend(opt_power(aa_a.as_ref().ok().map(|s| s.mean_w)));
            row.extend(power(aa.std_w));
            row.extend(opt_power(aa_a.as_ref().ok().map(|s| s.std_w)));
            row.push(opt(eta.as_ref().ok().copied()));
            row.push(join_warnings([
                p.dep.regime_warning().unwrap_or_default(),
                summary_warn(&cbc),
                summary_warn(&cbc_a),
                aa.warning.clone().unwrap_or_default(),
                summary_warn(&aa_a),
                warn_of(&eta),
            ]));
            Ok(row)
        })
        .collect();
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

/// Dominant-interference CDF of I_tot on a log grid, with the Monte Carlo
/// CDF when mc.trials > 0. The second table holds per-point KS and JSD.
pub fn interference_cdf(cfg: &LoadedConfig) -> Result<(Table, Table), CliError> {
    let points = cfg.points()?;
    let name = cfg.config.sweep.parameter.clone();
    let mut t = Table::new(&[
        "parameter",
        "value",
        "i_tot_w",
        "i_tot_dbm",
        "cdf_di",
        "cdf_clamped",
        "cdf_mc",
        "r_dom_m",
        "rdom_cdf",
        "warning",
    ]);
    let mut s = Table::new(&["parameter", "value", "trials", "ks_rdom", "jsd_itot", "warning"]);
    for p in &points {
        let mc = p.config.mc_config()?;
        let model = ContourModel::new(&p.dep)?;
        let lo = model.itot_di(model.rdom_quantile_sf(CDF_TAIL));
        let hi = model.itot_sup();
        let hi = if hi.is_finite() { hi } else { model.itot_di(model.rdom_quantile_sf(1.0 - CDF_TAIL)) };
        let n = mc.bins.max(2);
        let grid: Vec<f64> = (0..n)
            .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
            .collect();
        let runs = if mc.trials > 0 { Realizer::new(&p.dep, &mc)?.run() } else { Vec::new() };
        let i_tot: Vec<f64> = runs.iter().map(|r| r.i_tot).collect();
        let emp = if i_tot.is_empty() { None } else { Some(empirical_cdf(&i_tot)?) };
        let warning = join_warnings([
            p.dep.regime_warning().unwrap_or_default(),
            model.warning().unwrap_or_default().to_string(),
        ]);
        for &i in &grid {
            let c = model.itot_cdf_di(i);
            let r = model.invert_itot(i).ok();
            let mut row = lead(p, &name);
            row.extend(power(i));
            row.push(num(c.p));
            row.push(c.clamped.to_string());
            row.push(opt(emp.as_ref().map(|e| e.eval(i))));
            row.push(opt(r));
            row.push(opt(r.map(|r| model.rdom_cdf(r))));
            row.push(warning.clone());
            t.push(row);
        }
        if let Some(e) = &emp {
            let rd: Vec<f64> = runs.iter().map(|r| r.r_dom_emp).collect();
            let ks = empirical_cdf(&rd)?.ks_against(|x| model.rdom_cdf(x));
            let j = jsd_against_cdf(&i_tot, |x| model.itot_cdf_di(x).p, mc.bins)?;
            let mut row = lead(p, &name);
            row.extend([e.len().to_string(), num(ks), num(j), warning.clone()]);
            s.push(row);
        }
    }
    Ok((t, s))
}

pub fn roc(cfg: &LoadedConfig) -> Result<Table, CliError> {
    let points = cfg.points()?;
    let name = cfg.config.sweep.parameter.clone();
    let thresholds = cfg.config.thresholds()?;
    let mut t = Table::new(&[
        "parameter",
        "value",
        "p_th_w",
        "p_th_dbm",
        "method",
        "pfa",
        "pd",
        "pfa_mc",
        "pd_mc",
        "se_pfa_mc",
        "se_pd_mc",
        "warning",
    ]);
    for p in &points {
        let mc = p.config.mc_config()?;
        let emp = if mc.trials > 0 {
            Some(empirical_detection_sweep(&p.dep, &p.setup, &thresholds, &mc)?)
        } else {
            None
        };
        let warning = p.dep.regime_warning().unwrap_or_default();
        for method in [Method::Chisq, Method::Clt] {
            let curve = roc_curve(&p.dep, &p.setup, &thresholds, method)?;
            for (k, pt) in curve.iter().enumerate() {
                let e = emp.as_ref().map(|e| e[k]);
                let mut row = lead(p, &name);
                row.extend(power(pt.p_th));
                row.push(method.to_string());
                row.push(num(pt.pfa));
                row.push(num(pt.pd));
                row.push(opt(e.map(|e| e.pfa)));
                row.push(opt(e.map(|e| e.pd)));
                row.push(opt(e.map(|e| e.se_pfa)));
                row.push(opt(e.map(|e| e.se_pd)));
                row.push(warning.clone());
                t.push(row);
            }
        }
    }
    Ok(t)
}

/// Minimum exclusion radius over the sweep values of r_exc_m (the candidate
/// set) for every (pd_thr, pfa_thr) pair.
pub fn min_exclusion(cfg: &LoadedConfig) -> Result<Table, CliError> {
    if cfg.config.sweep.parameter != "r_exc_m" {
        return Err(ConfigError::Invalid("min-exclusion needs sweep.parameter = \"r_exc_m\" (the candidate set)".into()).into());
    }
    let points = cfg.points()?;
    let candidates: Vec<f64> = points.iter().map(|p| p.value).collect();
    if candidates.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError::Invalid("sweep.values must be strictly ascending for min-exclusion".into()).into());
    }
    let setup = points[0].setup;
    let dep = points[0].dep;
    let mc = cfg.config.mc_config()?;
    let det = &cfg.config.detection;

    let mut cache: Vec<Option<(f64, f64)>> = vec![None; candidates.len()];
    let mut analytic = |r: f64| -> radcoex::Result<(f64, f64)> {
        let k = candidates.partition_point(|c| *c < r);
        if let Some(v) = cache[k] {
            return Ok(v);
        }
        let d = SpatialDetector::new(&points[k].dep)?;
        let v = (d.pd(&setup, Method::Chisq)?, d.pfa(&setup, Method::Chisq)?);
        cache[k] = Some(v);
        Ok(v)
    };
    let panel = if mc.trials > 0 { Some(DetectionPanel::new(&dep, &setup, &candidates, &mc)?) } else { None };

    let mut t = Table::new(&[
        "pd_thr",
        "pfa_thr",
        "p_th_w",
        "r_exc_min_m",
        "evaluations",
        "linear_scan",
        "r_exc_min_mc_m",
        "warning",
    ]);
    for &pd_thr in &det.pd_thr {
        for &pfa_thr in &det.pfa_thr {
            let a = min_exclusion_search(&candidates, pd_thr, pfa_thr, &mut analytic)?;
            let m = match &panel {
                Some(p) => p.min_exclusion(setup.p_th, pd_thr, pfa_thr)?.radius,
                None => None,
            };
            let warning = match a.radius {
                None => "infeasible on the candidate set".to_string(),
                Some(r) => points[candidates.partition_point(|c| *c < r)].dep.regime_warning().unwrap_or_default(),
            };
            t.push(vec![
                num(pd_thr),
                num(pfa_thr),
                num(setup.p_th),
                opt(a.radius),
                a.evaluated.len().to_string(),
                a.linear_scan.to_string(),
                opt(m),
                warning,
            ]);
        }
    }
    Ok(t)
}

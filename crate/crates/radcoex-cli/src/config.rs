//! Experiment configuration: a flat TOML file with one table per section.

use std::path::{Path, PathBuf};

use radcoex::avgint::CellModel;
use radcoex::detection::DetectionSetup;
use radcoex::simkit::McConfig;
use radcoex::{ArrayConfig, Deployment, Pointing};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

pub const DEFAULT_CONFIG: &str = include_str!("../default.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("bad override `{0}`: expected section.key=value")]
    Override(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlRef {
    Linear(f64),
    Model(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentSection {
    pub lambda_bs_km2: f64,
    pub r_exc_m: f64,
    pub h_bs_m: f64,
    pub h_rad_m: f64,
    pub p_bs_w: f64,
    pub k_users: usize,
    pub alpha: f64,
    pub f_c_ghz: f64,
    pub pl_ref: PlRef,
    pub bs_n_az: usize,
    pub bs_n_el: usize,
    pub rad_n_az: usize,
    pub rad_n_el: usize,
    pub rad_azimuth_deg: f64,
    pub rad_elevation_deg: f64,
    pub pdf_kmax: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionSection {
    pub n_samples: usize,
    pub p_tar_w: f64,
    pub noise_w: f64,
    pub p_th_w: f64,
    pub p_th_min_w: f64,
    pub p_th_max_w: f64,
    pub p_th_points: usize,
    pub pd_thr: Vec<f64>,
    pub pfa_thr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub trials: usize,
    pub seed: u64,
    pub cell_model: String,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub deployment: DeploymentSection,
    pub detection: DetectionSection,
    pub sweep: SweepSection,
    pub mc: McSection,
    pub output: OutputSection,
}

/// One point of the sweep, with the resolved library types.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub config: ExperimentConfig,
    pub dep: Deployment,
    pub setup: DetectionSetup,
}

/// Raw table plus the typed view; sweeps are applied on the table so every
/// point goes through the same validation.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    table: Table,
    pub config: ExperimentConfig,
}

pub fn parse_table(text: &str) -> Result<Table, ConfigError> {
    text.parse::<Table>().map_err(|e| ConfigError::Parse(e.to_string()))
}

fn typed(table: &Table) -> Result<ExperimentConfig, ConfigError> {
    // Round trip through text so serde reports the offending table and key.
    let text = toml::to_string(table).map_err(|e| ConfigError::Parse(e.to_string()))?;
    toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
}

fn parse_scalar(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("single key"),
        Err(_) => Value::String(raw.to_string()),
    }
}

/// Applies `section.key=value`; the value uses TOML syntax and falls back to a bare string.
pub fn apply_override(table: &mut Table, spec: &str) -> Result<(), ConfigError> {
    let bad = || ConfigError::Override(spec.to_string());
    let (path, raw) = spec.split_once('=').ok_or_else(bad)?;
    let (section, key) = path.trim().split_once('.').ok_or_else(bad)?;
    if section.is_empty() || key.is_empty() || key.contains('.') {
        return Err(bad());
    }
    let sec = table
        .entry(section.to_string())
        .or_insert_with(|| Value::Table(Table::new()))
        .as_table_mut()
        .ok_or_else(bad)?;
    sec.insert(key.to_string(), parse_scalar(raw.trim()));
    Ok(())
}

impl LoadedConfig {
    pub fn from_str(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table = parse_table(text)?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let config = typed(&table)?;
        let loaded = Self { table, config };
        loaded.check()?;
        Ok(loaded)
    }

    pub fn from_path(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        match path {
            None => Self::from_str(DEFAULT_CONFIG, overrides),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                    path: p.to_path_buf(),
                    source,
                })?;
                Self::from_str(&text, overrides)
            }
        }
    }

    fn check(&self) -> Result<(), ConfigError> {
        let c = &self.config;
        if c.sweep.values.is_empty() {
            return Err(ConfigError::Invalid("sweep.values is empty".into()));
        }
        self.sweep_section()?;
        c.mc_config()?;
        for p in self.points()? {
            p.dep.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    /// Section holding the swept key.
    fn sweep_section(&self) -> Result<&'static str, ConfigError> {
        let key = self.config.sweep.parameter.as_str();
        for sec in ["deployment", "detection"] {
            let found = self.table.get(sec).and_then(|t| t.get(key));
            if let Some(v) = found {
                if v.is_integer() || v.is_float() {
                    return Ok(sec);
                }
            }
        }
        Err(ConfigError::Invalid(format!(
            "sweep.parameter `{key}` is not a numeric key of [deployment] or [detection]"
        )))
    }

    pub fn points(&self) -> Result<Vec<SweepPoint>, ConfigError> {
        let sec = self.sweep_section()?;
        let key = self.config.sweep.parameter.as_str();
        let is_int = self.table[sec][key].is_integer();
        self.config
            .sweep
            .values
            .iter()
            .map(|&value| {
                let mut t = self.table.clone();
                let v = if is_int {
                    if value.fract() != 0.0 || value < 0.0 {
                        return Err(ConfigError::Invalid(format!("sweep value {value} for `{key}` must be a nonnegative integer")));
                    }
                    Value::Integer(value as i64)
                } else {
                    Value::Float(value)
                };
                t.get_mut(sec).and_then(Value::as_table_mut).expect("section").insert(key.to_string(), v);
                let config = typed(&t)?;
                let dep = config.deployment()?;
                let setup = config.detection_setup()?;
                Ok(SweepPoint { value, config, dep, setup })
            })
            .collect()
    }
}

impl ExperimentConfig {
    pub fn deployment(&self) -> Result<Deployment, ConfigError> {
        let d = &self.deployment;
        let inv = |e: radcoex::Error| ConfigError::Invalid(e.to_string());
        let mut dep = Deployment {
            lambda_bs: d.lambda_bs_km2,
            r_exc: d.r_exc_m,
            h_bs: d.h_bs_m,
            h_rad: d.h_rad_m,
            p_bs: d.p_bs_w,
            k_users: d.k_users,
            alpha: d.alpha,
            pl_ref: 1.0,
            f_c: d.f_c_ghz,
            bs_array: ArrayConfig::new(d.bs_n_az, d.bs_n_el).map_err(inv)?,
            rad_array: ArrayConfig::new(d.rad_n_az, d.rad_n_el).map_err(inv)?,
            rad_point: Pointing::degrees(d.rad_azimuth_deg, d.rad_elevation_deg).map_err(inv)?,
        };
        dep = match &d.pl_ref {
            PlRef::Linear(x) => Deployment { pl_ref: *x, ..dep },
            PlRef::Model(m) if m.eq_ignore_ascii_case("uma") => dep.with_uma_reference().map_err(inv)?,
            PlRef::Model(m) => return Err(ConfigError::Invalid(format!("deployment.pl_ref `{m}`: expected \"uma\" or a number"))),
        };
        dep.validate().map_err(inv)?;
        Ok(dep)
    }

    pub fn detection_setup(&self) -> Result<DetectionSetup, ConfigError> {
        let d = &self.detection;
        DetectionSetup::new(d.n_samples, d.p_tar_w, d.noise_w, d.p_th_w).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn thresholds(&self) -> Result<Vec<f64>, ConfigError> {
        let d = &self.detection;
        if !(d.p_th_min_w > 0.0 && d.p_th_max_w > d.p_th_min_w && d.p_th_points >= 2) {
            return Err(ConfigError::Invalid("threshold grid needs 0 < p_th_min_w < p_th_max_w and p_th_points >= 2".into()));
        }
        let (a, b) = (d.p_th_min_w.ln(), d.p_th_max_w.ln());
        let n = d.p_th_points - 1;
        Ok((0..=n).map(|k| (a + (b - a) * k as f64 / n as f64).exp()).collect())
    }

    pub fn cell_model(&self) -> Result<CellModel, ConfigError> {
        match self.mc.cell_model.to_ascii_uppercase().as_str() {
            "AAECC" => Ok(CellModel::Aaecc),
            "CBC" => Ok(CellModel::Cbc),
            other => Err(ConfigError::Invalid(format!("mc.cell_model `{other}`: expected AAECC or CBC"))),
        }
    }

    /// trials = 0 is accepted and means analytic output only.
    pub fn mc_config(&self) -> Result<McConfig, ConfigError> {
        let mc = McConfig {
            cell_model: self.cell_model()?,
            bins: self.mc.bins,
            ..McConfig::new(self.mc.trials.max(1), self.mc.seed)
        };
        mc.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(McConfig { trials: self.mc.trials, ..mc })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_reference() {
        let c = LoadedConfig::from_str(DEFAULT_CONFIG, &[]).unwrap().config;
        assert_eq!(c.deployment().unwrap(), Deployment::reference());
        let s = c.detection_setup().unwrap();
        assert_eq!((s.n_samples, s.p_tar, s.noise_w), (10, 1e-7, 1e-9));
        let th = c.thresholds().unwrap();
        assert_eq!(th.len(), 41);
        assert!((th[40] / 1e-6 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn override_and_sweep() {
        let o = vec!["deployment.h_bs_m=60".to_string(), "sweep.parameter=\"k_users\"".into(), "sweep.values=[1, 8]".into()];
        let l = LoadedConfig::from_str(DEFAULT_CONFIG, &o).unwrap();
        let pts = l.points().unwrap();
        assert_eq!(pts[1].dep.k_users, 8);
        assert_eq!(pts[0].dep.h_bs, 60.0);
        // pathloss follows the new height
        assert_ne!(pts[0].dep.pl_ref, Deployment::reference().pl_ref);
    }

    #[test]
    fn missing_field_is_named() {
        let text = DEFAULT_CONFIG.replace("h_rad_m = 20.0\n", "");
        let e = LoadedConfig::from_str(&text, &[]).unwrap_err().to_string();
        assert!(e.contains("h_rad_m"), "{e}");
    }

    #[test]
    fn bad_inputs() {
        assert!(LoadedConfig::from_str(DEFAULT_CONFIG, &["nodot=1".into()]).is_err());
        assert!(LoadedConfig::from_str(DEFAULT_CONFIG, &["sweep.parameter=pl_ref".into()]).is_err());
        assert!(LoadedConfig::from_str(DEFAULT_CONFIG, &["deployment.bogus=1".into()]).is_err());
        assert!(LoadedConfig::from_str(DEFAULT_CONFIG, &["deployment.h_bs_m=20".into()]).is_err());
        assert!(LoadedConfig::from_str(DEFAULT_CONFIG, &["mc.cell_model=PV".into()]).is_err());
    }
}

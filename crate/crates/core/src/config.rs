//! Run configuration, canonical echo and manifests.
//!
//! The configuration is TOML. Every field has a default, so an empty file is
//! a valid configuration. The canonical echo writes tables and keys in sorted
//! order and every float with 17 significant digits, which makes its SHA-256
//! digest a stable identity for the run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::history::{RegionIndex, DEFAULT_STORAGE_BUDGET};
use crate::lab::SweepConfig;
use crate::profiles::{ParamWarning, PmlParams, DEFAULT_THICKNESS_RATIO};
use crate::yee::{ScattererSpec, SourceSpec, DEFAULT_CFL};

pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha), seeded from u64";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub eps: f64,
    pub mu: f64,
    #[serde(rename = "L")]
    pub l: [f64; 3],
    #[serde(rename = "T")]
    pub t_final: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self { eps: 1.0, mu: 1.0, l: [2.0; 3], t_final: 6.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MediumKind {
    Pml,
    Vacuum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Layer {
    pub d: f64,
    pub sigma0: f64,
    pub m: u32,
    /// Defaults to `1 / T`.
    pub s1: Option<f64>,
    /// `C0` in the thickness check `max(L) <= C0 d`.
    pub thickness_ratio: f64,
    pub medium: MediumKind,
}

impl Default for Layer {
    fn default() -> Self {
        Self {
            d: 0.5,
            sigma0: 4.0,
            m: 1,
            s1: None,
            thickness_ratio: DEFAULT_THICKNESS_RATIO,
            medium: MediumKind::Pml,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub h: f64,
    pub cfl: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self { h: 0.0625, cfl: DEFAULT_CFL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Source {
    pub location: [f64; 3],
    /// 1-based axis.
    pub polarization: usize,
    pub amplitude: f64,
    pub t0: f64,
    pub tau: f64,
}

impl Default for Source {
    fn default() -> Self {
        Self { location: [0.0; 3], polarization: 3, amplitude: 1.0, t0: 3.0, tau: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scatterer {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub sigma0: Vec<f64>,
    pub d: Vec<f64>,
    /// Defaults to `c T / 2 + 1`.
    pub reference_margin: Option<f64>,
    pub record_interval: f64,
    pub storage_budget: u64,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            sigma0: vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0],
            d: vec![0.5],
            reference_margin: None,
            record_interval: 0.1,
            storage_budget: DEFAULT_STORAGE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Kernels {
    pub samples: usize,
    pub panels: usize,
}

impl Default for Kernels {
    fn default() -> Self {
        Self { samples: 10_000, panels: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Simulate {
    /// Probe point for the time series; defaults to the source location.
    pub probe: Option<[f64; 3]>,
    /// Steps between energy/probe samples.
    pub sample_every: u64,
}

impl Default for Simulate {
    fn default() -> Self {
        Self { probe: None, sample_every: 10 }
    }
}

/// Full configuration as read from disk.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub physics: Physics,
    pub pml: Layer,
    pub grid: Grid,
    pub source: Source,
    pub scatterer: Option<Scatterer>,
    pub sweep: Sweep,
    pub kernels: Kernels,
    pub simulate: Simulate,
}

/// Configuration with defaults resolved and every invariant checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    pub raw: Config,
    pub params: PmlParams,
    pub grid: GridSpec,
    pub source: SourceSpec,
    pub scatterer: Option<ScattererSpec>,
    pub warnings: Vec<ParamWarning>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Resolves optional values so the echo shows what a run actually uses.
    pub fn with_defaults(mut self) -> Self {
        if self.pml.s1.is_none() {
            self.pml.s1 = Some(1.0 / self.physics.t_final);
        }
        if self.sweep.reference_margin.is_none() {
            let c = 1.0 / (self.physics.eps * self.physics.mu).sqrt();
            self.sweep.reference_margin = Some(0.5 * c * self.physics.t_final + 1.0);
        }
        self
    }

    pub fn params(&self) -> PmlParams {
        PmlParams {
            eps: self.physics.eps,
            mu: self.physics.mu,
            l: self.physics.l,
            d: self.pml.d,
            sigma0: self.pml.sigma0,
            m: self.pml.m,
            s1: self.pml.s1.unwrap_or(1.0 / self.physics.t_final),
            t_final: self.physics.t_final,
        }
    }

    pub fn source_spec(&self) -> SourceSpec {
        SourceSpec {
            location: self.source.location,
            polarization: self.source.polarization.wrapping_sub(1),
            amplitude: self.source.amplitude,
            t0: self.source.t0,
            tau: self.source.tau,
        }
    }

    pub fn validate(self) -> Result<ValidatedConfig> {
        let raw = self.with_defaults();
        let params = raw.params();
        params.validate()?;
        if !(1..=3).contains(&raw.source.polarization) {
            return Err(Error::Config(format!(
                "source polarization must be an axis 1..3, got {}",
                raw.source.polarization
            )));
        }
        let grid = GridSpec::for_params(&params, raw.grid.h)?;
        RegionIndex::inner_box(&grid, params.l)?;
        let source = raw.source_spec();
        source.validate(&params, raw.grid.h)?;
        let scatterer = raw.scatterer.as_ref().map(|s| ScattererSpec { lo: s.lo, hi: s.hi });
        if !(raw.grid.cfl > 0.0 && raw.grid.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must be in (0, 1], got {}", raw.grid.cfl)));
        }
        raw.sweep_config()?.validate()?;
        let warnings = params.warnings(raw.pml.thickness_ratio);
        Ok(ValidatedConfig { raw, params, grid, source, scatterer, warnings })
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let params = self.params();
        let mut cfg = SweepConfig::new(
            params,
            self.sweep.sigma0.clone(),
            self.sweep.d.clone(),
            self.grid.h,
            self.source_spec(),
        );
        if let Some(m) = self.sweep.reference_margin {
            cfg.reference_margin = m;
        }
        cfg.scatterer = self.scatterer.as_ref().map(|s| ScattererSpec { lo: s.lo, hi: s.hi });
        cfg.cfl = self.grid.cfl;
        cfg.record_interval = self.sweep.record_interval;
        cfg.storage_budget = self.sweep.storage_budget;
        Ok(cfg)
    }

    /// Sorted keys, fixed float formatting.
    pub fn canonical(&self) -> Result<String> {
        let value = toml::Value::try_from(self.clone().with_defaults()).map_err(|e| Error::Config(e.to_string()))?;
        let table = match value {
            toml::Value::Table(t) => t,
            _ => unreachable!("config serializes to a table"),
        };
        let mut out = String::new();
        write_table(&mut out, &table, "");
        Ok(out)
    }

    pub fn digest(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical()?.as_bytes())))
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_value(v: &toml::Value) -> String {
    match v {
        toml::Value::Float(f) => fmt_float(*f),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::String(s) => format!("{:?}", s),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(a) => {
            let items: Vec<String> = a.iter().map(fmt_value).collect();
            format!("[{}]", items.join(", "))
        }
        toml::Value::Datetime(d) => d.to_string(),
        toml::Value::Table(_) => unreachable!("nested tables are written as sections"),
    }
}

fn write_table(out: &mut String, table: &toml::Table, prefix: &str) {
    let mut keys: Vec<&String> = table.keys().collect();
    keys.sort();
    for k in &keys {
        let v = &table[k.as_str()];
        if !v.is_table() {
            out.push_str(&format!("{k} = {}\n", fmt_value(v)));
        }
    }
    for k in &keys {
        if let toml::Value::Table(sub) = &table[k.as_str()] {
            let name = if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
            out.push_str(&format!("\n[{name}]\n"));
            write_table(out, sub, &name);
        }
    }
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub tool_version: String,
    pub command: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub seed: u64,
    pub rng: String,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}

pub fn unix_now() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_echo() {
        let cfg = Config::from_toml("").unwrap();
        let v = cfg.clone().validate().unwrap();
        assert_eq!(v.params.m, 1);
        assert_eq!(v.params.s1, 1.0 / 6.0);
        assert_eq!(v.raw.grid.cfl, 0.9);
        let echo = cfg.canonical().unwrap();
        assert!(echo.contains("cfl = 9.0000000000000002e-1"), "{echo}");
        assert!(echo.contains("m = 1\n"));
        assert!(echo.contains("s1 = 1.6666666666666666e-1"), "{echo}");
        assert!(echo.contains("reference_margin = 4.0000000000000000e0"), "{echo}");
    }

    #[test]
    fn echo_round_trips_digest() {
        let cfg = Config::from_toml("[pml]\nsigma0 = 2.5\n[sweep]\nsigma0 = [0.0, 1.25]\n").unwrap();
        let echo = cfg.canonical().unwrap();
        let again = Config::from_toml(&echo).unwrap();
        assert_eq!(again.digest().unwrap(), cfg.digest().unwrap());
        assert_eq!(again.canonical().unwrap(), echo);
    }

    #[test]
    fn alignment_error() {
        let cfg = Config::from_toml("[physics]\nL = [2.0, 2.0, 2.0]\n[grid]\nh = 0.3\n[pml]\nd = 0.6\n").unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("not a multiple of h"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn negative_sigma_rejected() {
        let cfg = Config::from_toml("[pml]\nsigma0 = -1.0\n").unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("sigma0 must be > 0"), "{err}");
    }

    #[test]
    fn source_outside_b1_rejected() {
        let cfg = Config::from_toml("[source]\nlocation = [1.2, 0.0, 0.0]\n").unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("source support must lie in B1"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::from_toml("[pml]\nsigma = 1.0\n").is_err());
    }

    #[test]
    fn warnings_reported() {
        let v = Config::from_toml("").unwrap().validate().unwrap();
        assert!(v.warnings.iter().any(|w| matches!(w, ParamWarning::SubUnitThickness { .. })));
    }
}

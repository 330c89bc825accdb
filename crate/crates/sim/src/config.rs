//! TOML experiment configuration.
//!
//! SNRs are written in dB here and converted to linear power when the
//! [`ExperimentSpec`] is built. Every section and key is optional; missing values
//! fall back to the baseline setup (`M = K = 4`, 100 ports over 4 wavelengths,
//! `L = 2`, 15 dB).

use std::fmt;
use std::path::Path;

use fama_core::{GeportOptions, PortTopology, Strategy, SystemConfig, VectorConvention};
use serde::{Deserialize, Serialize};

use crate::experiment::{ExperimentSpec, Sweep, TargetUser};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PortsSpec {
    Line(usize),
    Grid([usize; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ApertureSpec {
    Line(f64),
    Grid([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub users: usize,
    pub ports: PortsSpec,
    /// Wavelengths; `[w1, w2]` for a grid.
    pub aperture: ApertureSpec,
    pub active_ports: usize,
    pub snr_db: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            users: 4,
            ports: PortsSpec::Line(100),
            aperture: ApertureSpec::Line(4.0),
            active_ports: 2,
            snr_db: 15.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub snr_db: Vec<f64>,
    pub active_ports: Vec<usize>,
    pub ports: Vec<usize>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            snr_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            active_ports: vec![1, 2, 4, 6, 8],
            ports: vec![25, 50, 100, 200, 400],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Index(usize),
    /// Only `"all"` is accepted.
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub trials: u64,
    pub seed: u64,
    pub strategies: Vec<String>,
    /// `"all"` or a zero-based user index.
    pub target_user: TargetSpec,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            trials: 2000,
            seed: 1,
            strategies: Strategy::ALL.iter().map(|s| s.name().to_string()).collect(),
            target_user: TargetSpec::Named("all".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeportSection {
    pub convention: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_loss: Option<f64>,
}

impl Default for GeportSection {
    fn default() -> Self {
        Self {
            convention: VectorConvention::default().name().into(),
            stop_loss: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub system: SystemSection,
    pub sweep: SweepSection,
    pub run: RunSection,
    pub geport: GeportSection,
}

/// Configuration problem, reported with exit status 2.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub source_name: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.source_name, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(source_name: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        source_name: source_name.to_string(),
        message: message.into(),
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Which axis a sweep command varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Snr,
    ActivePorts,
    Ports,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Self::Snr => "snr_db",
            Self::ActivePorts => "active_ports",
            Self::Ports => "ports",
        }
    }
}

impl Config {
    /// Parses TOML text; `source_name` prefixes diagnostics.
    pub fn from_toml(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| err(source_name, e.to_string().trim_end().to_string()))
    }

    /// Reads a `.toml` config, or the `config` member of a run manifest (`.json`).
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| err(&name, format!("cannot read: {e}")))?;
        if path.extension().is_some_and(|x| x == "json") {
            let manifest: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| err(&name, format!("invalid manifest: {e}")))?;
            let config = manifest
                .get("config")
                .ok_or_else(|| err(&name, "manifest has no `config` member"))?;
            return serde_json::from_value(config.clone()).map_err(|e| err(&name, format!("config: {e}")));
        }
        Self::from_toml(&text, &name)
    }

    /// Applies `key=value` overrides. Keys are `section.field`; `seed`, `trials`,
    /// `strategies` and `target_user` may omit the `run.` prefix. Values use TOML
    /// syntax, with bare words and comma lists accepted as strings.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self, ConfigError> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut table = toml::Table::try_from(self).map_err(|e| err("--set", e.to_string()))?;
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| err("--set", format!("`{item}` is not key=value")))?;
            let key = key.trim();
            let full = match key {
                "seed" | "trials" | "strategies" | "target_user" => format!("run.{key}"),
                _ => key.to_string(),
            };
            let (section, field) = full
                .split_once('.')
                .ok_or_else(|| err("--set", format!("`{key}`: expected section.field")))?;
            let value = parse_override_value(field, raw.trim());
            let entry = table
                .get_mut(section)
                .and_then(|v| v.as_table_mut())
                .ok_or_else(|| err("--set", format!("unknown section `{section}`")))?;
            entry.insert(field.to_string(), value);
        }
        let name = format!("--set {}", overrides.join(" "));
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| err(&name, e.to_string().trim_end().to_string()))
    }

    pub fn system_config(&self, snr: f64) -> Result<SystemConfig, ConfigError> {
        let s = &self.system;
        let topology = match (&s.ports, &s.aperture) {
            (PortsSpec::Line(n), ApertureSpec::Line(w)) => PortTopology::line(*n, *w),
            (PortsSpec::Grid([n1, n2]), ApertureSpec::Grid([w1, w2])) => PortTopology::grid(*n1, *n2, *w1, *w2),
            (PortsSpec::Grid(_), ApertureSpec::Line(_)) => {
                return Err(err("system.aperture", "a grid needs `aperture = [w1, w2]`"))
            }
            (PortsSpec::Line(_), ApertureSpec::Grid(_)) => {
                return Err(err("system.ports", "a two-axis aperture needs `ports = [n1, n2]`"))
            }
        }
        .map_err(|e| err("system.ports", e.to_string()))?;
        SystemConfig::new(s.users, s.active_ports, snr, topology).map_err(|e| err("system", e.to_string()))
    }

    pub fn strategies(&self) -> Result<Vec<Strategy>, ConfigError> {
        self.run
            .strategies
            .iter()
            .map(|s| {
                s.parse()
                    .map_err(|_| err("run.strategies", format!("unknown strategy `{s}` (slow_fama, mrc, dc, geport)")))
            })
            .collect()
    }

    pub fn target_user(&self) -> Result<TargetUser, ConfigError> {
        match &self.run.target_user {
            TargetSpec::Index(k) => Ok(TargetUser::Index(*k)),
            TargetSpec::Named(s) if s == "all" => Ok(TargetUser::All),
            TargetSpec::Named(s) => Err(err("run.target_user", format!("expected \"all\" or an index, got `{s}`"))),
        }
    }

    pub fn geport_options(&self) -> Result<GeportOptions, ConfigError> {
        let convention = self.geport.convention.parse().map_err(|_| {
            err(
                "geport.convention",
                format!("unknown convention `{}` (pivoted, whitened, raw)", self.geport.convention),
            )
        })?;
        if let Some(x) = self.geport.stop_loss {
            if !(x >= 0.0) {
                return Err(err("geport.stop_loss", "must be non-negative"));
            }
        }
        Ok(GeportOptions {
            convention,
            stop_loss: self.geport.stop_loss,
            ..GeportOptions::default()
        })
    }

    /// Sweep values as written (dB for SNR), as printed in results.
    pub fn sweep_labels(&self, axis: Axis) -> Vec<f64> {
        match axis {
            Axis::Snr => self.sweep.snr_db.clone(),
            Axis::ActivePorts => self.sweep.active_ports.iter().map(|&l| l as f64).collect(),
            Axis::Ports => self.sweep.ports.iter().map(|&n| n as f64).collect(),
        }
    }

    pub fn experiment(&self, axis: Axis) -> Result<ExperimentSpec, ConfigError> {
        let base = self.system_config(db_to_linear(self.system.snr_db))?;
        let (sweep, field) = match axis {
            Axis::Snr => (
                Sweep::Snr(self.sweep.snr_db.iter().map(|&d| db_to_linear(d)).collect()),
                "sweep.snr_db",
            ),
            Axis::ActivePorts => (Sweep::ActivePorts(self.sweep.active_ports.clone()), "sweep.active_ports"),
            Axis::Ports => (Sweep::Ports(self.sweep.ports.clone()), "sweep.ports"),
        };
        let spec = ExperimentSpec {
            base,
            sweep,
            strategies: self.strategies()?,
            trials: self.run.trials,
            master_seed: self.run.seed,
            target_user: self.target_user()?,
            geport: self.geport_options()?,
        };
        spec.validate().map_err(|e| {
            let field = match &e {
                crate::experiment::HarnessError::Spec(m) if m.contains("trials") => "run.trials",
                crate::experiment::HarnessError::Spec(m) if m.contains("strateg") => "run.strategies",
                crate::experiment::HarnessError::Spec(m) if m.contains("target") => "run.target_user",
                _ => field,
            };
            err(field, e.to_string())
        })?;
        Ok(spec)
    }
}

fn parse_override_value(field: &str, raw: &str) -> toml::Value {
    if let Ok(t) = format!("v = {raw}").parse::<toml::Table>() {
        if let Some(v) = t.get("v") {
            return v.clone();
        }
    }
    if field == "strategies" {
        return toml::Value::Array(
            raw.split(',')
                .map(|s| toml::Value::String(s.trim().to_string()))
                .collect(),
        );
    }
    toml::Value::String(raw.to_string())
}

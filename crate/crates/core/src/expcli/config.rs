//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Recognized keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `system` | `lsv`, `doubling`, `tent`, `logistic`, `catmap` | required |
//! | `alpha` | LSV intermittency exponent, `0 ≤ α < 1` | `0` |
//! | `p` | singular point, `x` or `x,y` on the torus | required |
//! | `k` | observable exponent | required for `power` |
//! | `observable` | `power` (`d^-k`) or `log` (`−log d`) | `power` |
//! | `schedule` | `radius_power`, `measure_harmonic`, `kim` | `radius_power` |
//! | `schedule_c` | constant of `radius_power` / `measure_harmonic` | `0.25` / `1` |
//! | `schedule_beta` | log power of `measure_harmonic` | `0` |
//! | `schedule_gamma` | exponent of `kim` | required for `kim` |
//! | `n_max` | orbit length | required |
//! | `ensemble_size` | number of orbits | `32` |
//! | `master_seed` | seed of the whole ensemble | required |
//! | `checkpoint_ratio` | geometric checkpoint spacing | `10^(1/8)` |
//! | `delta` | QSBC residual slack | `0.1` |
//! | `eta` | Aaronson log power | `0.1` |
//! | `exponent_metric` | `slope` or `pointwise` | `slope` |
//! | `tolerance` | pass band around the predicted exponent | `0.2` |
//! | `output_csv` | per-orbit checkpoint CSV path | `results.csv` |
//! | `output_summary` | JSON summary path | `summary.json` |

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::accumulate::{
    default_checkpoint_ratio, RunParams, DEFAULT_DELTA, DEFAULT_ETA, MIN_ORBIT_LENGTH,
};
use crate::dynamics::{Point, SystemDescriptor, SystemId};
use crate::measure::{ScheduleKind, TargetSchedule};
use crate::observables::{ObservableKind, ObservableSpec};

pub const KEYS: &[&str] = &[
    "system",
    "alpha",
    "p",
    "k",
    "observable",
    "schedule",
    "schedule_c",
    "schedule_beta",
    "schedule_gamma",
    "n_max",
    "ensemble_size",
    "master_seed",
    "checkpoint_ratio",
    "delta",
    "eta",
    "exponent_metric",
    "tolerance",
    "output_csv",
    "output_summary",
];

pub const DEFAULT_ENSEMBLE_SIZE: usize = 32;
pub const DEFAULT_TOLERANCE: f64 = 0.2;

/// A configuration problem, located at a line of the config file when it has one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMetric {
    /// Trailing-decade least-squares slope.
    Slope,
    /// `log S_n / log n` at the final checkpoint.
    Pointwise,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub system: SystemDescriptor,
    pub observable: ObservableSpec,
    pub schedule: ScheduleKind,
    pub n_max: u64,
    pub ensemble_size: usize,
    pub master_seed: u64,
    pub checkpoint_ratio: f64,
    pub delta: f64,
    pub eta: f64,
    pub exponent_metric: ExponentMetric,
    pub tolerance: f64,
    pub output_csv: PathBuf,
    pub output_summary: PathBuf,
}

/// Raw `key → (value, line)` entries, later entries overriding earlier ones.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Option<usize>)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
                line: Some(lineno),
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            raw.insert(key.trim(), value.trim(), Some(lineno))?;
        }
        Ok(raw)
    }

    /// Sets a key, rejecting names that are not configuration keys.
    pub fn insert(
        &mut self,
        key: &str,
        value: &str,
        line: Option<usize>,
    ) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError {
                line,
                message: format!("unknown key `{key}`"),
            });
        }
        self.entries
            .insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    /// Applies a `key=value` override given outside the file.
    pub fn set_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| ConfigError {
            line: None,
            message: format!("override `{assignment}` is not of the form key=value"),
        })?;
        self.insert(key.trim(), value.trim(), None)
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).and_then(|(_, l)| *l)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.line(key),
            message: message.into(),
        }
    }

    fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<&str, ConfigError> {
        self.get_str(key).ok_or_else(|| ConfigError {
            line: None,
            message: format!("missing required key `{key}`"),
        })
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.get_str(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| self.err(key, format!("invalid value `{v}` for `{key}`: {e}")))
            })
            .transpose()
    }

    fn required_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.required(key)?;
        Ok(self.parsed(key)?.expect("checked above"))
    }

    /// Validates every key and every module precondition that can be checked
    /// before running.
    pub fn build(&self) -> Result<ExperimentConfig, ConfigError> {
        let id: SystemId = self.required_parsed("system")?;
        let alpha = self.parsed::<f64>("alpha")?.unwrap_or(0.0);
        let system = SystemDescriptor::new(id, alpha).map_err(|e| {
            let key = if self.get_str("alpha").is_some() {
                "alpha"
            } else {
                "system"
            };
            self.err(key, e.to_string())
        })?;

        let p: Point = self.required_parsed("p")?;
        system
            .check_point(&p)
            .map_err(|e| self.err("p", e.to_string()))?;

        let observable = match self.get_str("observable").unwrap_or("power") {
            "power" => {
                let k: f64 = self.required_parsed("k")?;
                ObservableSpec::power(p, k).map_err(|e| self.err("k", e.to_string()))?
            }
            "log" => ObservableSpec::log(p),
            other => {
                return Err(self.err(
                    "observable",
                    format!("unknown observable `{other}` (expected power or log)"),
                ))
            }
        };

        let schedule = match self.get_str("schedule").unwrap_or("radius_power") {
            "radius_power" => ScheduleKind::RadiusPower {
                c: self.parsed("schedule_c")?.unwrap_or(0.25),
            },
            "measure_harmonic" => ScheduleKind::MeasureHarmonic {
                c: self.parsed("schedule_c")?.unwrap_or(1.0),
                beta: self.parsed("schedule_beta")?.unwrap_or(0.0),
            },
            "kim" => ScheduleKind::KimNonBc {
                gamma: self.required_parsed("schedule_gamma")?,
            },
            other => {
                return Err(self.err(
                    "schedule",
                    format!(
                    "unknown schedule `{other}` (expected radius_power, measure_harmonic or kim)"
                ),
                ))
            }
        };

        let n_max: u64 = self.required_parsed("n_max")?;
        let master_seed: u64 = self.required_parsed("master_seed")?;
        let ensemble_size = self
            .parsed::<usize>("ensemble_size")?
            .unwrap_or(DEFAULT_ENSEMBLE_SIZE);
        if ensemble_size == 0 {
            return Err(self.err("ensemble_size", "ensemble_size must be at least 1"));
        }

        let exponent_metric = match self.get_str("exponent_metric").unwrap_or("slope") {
            "slope" => ExponentMetric::Slope,
            "pointwise" => ExponentMetric::Pointwise,
            other => {
                return Err(self.err(
                    "exponent_metric",
                    format!("unknown exponent_metric `{other}` (expected slope or pointwise)"),
                ))
            }
        };
        let tolerance = self
            .parsed::<f64>("tolerance")?
            .unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0) {
            return Err(self.err(
                "tolerance",
                format!("tolerance must be positive, got {tolerance}"),
            ));
        }

        let cfg = ExperimentConfig {
            system,
            observable,
            schedule,
            n_max,
            ensemble_size,
            master_seed,
            checkpoint_ratio: self
                .parsed("checkpoint_ratio")?
                .unwrap_or_else(default_checkpoint_ratio),
            delta: self.parsed("delta")?.unwrap_or(DEFAULT_DELTA),
            eta: self.parsed("eta")?.unwrap_or(DEFAULT_ETA),
            exponent_metric,
            tolerance,
            output_csv: self.get_str("output_csv").unwrap_or("results.csv").into(),
            output_summary: self
                .get_str("output_summary")
                .unwrap_or("summary.json")
                .into(),
        };

        if cfg.n_max < MIN_ORBIT_LENGTH {
            return Err(self.err(
                "n_max",
                format!(
                    "n_max must be at least {MIN_ORBIT_LENGTH}, got {}",
                    cfg.n_max
                ),
            ));
        }
        if !(cfg.checkpoint_ratio > 1.0 && cfg.checkpoint_ratio.is_finite()) {
            return Err(self.err(
                "checkpoint_ratio",
                format!(
                    "checkpoint_ratio must exceed 1, got {}",
                    cfg.checkpoint_ratio
                ),
            ));
        }
        for (key, v) in [("delta", cfg.delta), ("eta", cfg.eta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(self.err(key, format!("{key} must be positive, got {v}")));
            }
        }
        TargetSchedule::validate(&cfg.schedule, &cfg.system, &p).map_err(|e| {
            let key = match cfg.schedule {
                ScheduleKind::KimNonBc { .. } => "schedule_gamma",
                _ => "schedule",
            };
            self.err(key, e.to_string())
        })?;
        if cfg.observable.kind == ObservableKind::PowerDistance {
            crate::measure::predicted_exponent(&cfg.system, &p, cfg.observable.k)
                .map_err(|e| self.err("k", e.to_string()))?;
        }
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        RawConfig::parse(text)?.build()
    }

    /// Parameters of orbit `i`.
    pub fn run_params(&self, index: usize) -> RunParams {
        RunParams {
            n_max: self.n_max,
            seed: super::orbit_seed(self.master_seed, index as u64),
            checkpoint_ratio: self.checkpoint_ratio,
            delta: self.delta,
            eta: self.eta,
        }
    }

    pub fn schedule_point(&self) -> Point {
        self.observable.p
    }

    /// The configuration as `key = value` lines, which parse back to `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        put("system", self.system.id.to_string());
        put("alpha", format!("{}", self.system.alpha));
        put("p", self.observable.p.to_string());
        match self.observable.kind {
            ObservableKind::PowerDistance => {
                put("observable", "power".into());
                put("k", format!("{}", self.observable.k));
            }
            ObservableKind::LogDistance => put("observable", "log".into()),
        }
        put("schedule", self.schedule.name().into());
        match self.schedule {
            ScheduleKind::RadiusPower { c } => put("schedule_c", format!("{c}")),
            ScheduleKind::MeasureHarmonic { c, beta } => {
                put("schedule_c", format!("{c}"));
                put("schedule_beta", format!("{beta}"));
            }
            ScheduleKind::KimNonBc { gamma } => put("schedule_gamma", format!("{gamma}")),
        }
        put("n_max", self.n_max.to_string());
        put("ensemble_size", self.ensemble_size.to_string());
        put("master_seed", self.master_seed.to_string());
        put("checkpoint_ratio", format!("{}", self.checkpoint_ratio));
        put("delta", format!("{}", self.delta));
        put("eta", format!("{}", self.eta));
        put(
            "exponent_metric",
            match self.exponent_metric {
                ExponentMetric::Slope => "slope",
                ExponentMetric::Pointwise => "pointwise",
            }
            .into(),
        );
        put("tolerance", format!("{}", self.tolerance));
        put("output_csv", self.output_csv.display().to_string());
        put("output_summary", self.output_summary.display().to_string());
        out
    }
}

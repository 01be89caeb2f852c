//! TOML run configuration.
//!
//! ```toml
//! m = 64
//! l = 4
//! n = 100
//! k = 4
//! # s = 4              # default min(m, l)
//! power_dbm = 30.0
//! noise_dbm = -90.0
//! carrier_ghz = 2.6
//! rician_k_db = 10.0
//! seed = 1
//!
//! [positions]          # meters; any subset
//! bs = [0.0, 0.0, 20.0]
//! is = [250.0, 0.0, 5.0]
//! user = [250.0, 25.0, 1.5]
//!
//! [experiment]
//! trials = 20
//! samples = 1000
//! rounds = 1
//! mode = "expected"    # or "sampled"
//! n_symbols = 16       # sampled mode only
//! algorithms = ["zps", "linear_search", "blind_csm", "beam_training"]
//! gap_algorithms = ["zps"]
//! m_grid = [8, 16, 32, 64]
//! n_grid = [100, 200, 400, 600, 800]
//! gap_n_grid = [100, 200, 400, 600, 800]
//! t_grid = [100, 1000, 10000, 100000]
//! timing_n_grid = [100, 200, 300]
//! timing_runs = 7
//! ```
//!
//! `m`, `l`, `n` and `k` are required; everything else has the defaults shown.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentSpec, Study};
use crate::mimo::MeasurementMode;
use crate::passive::{Algorithm, PassiveSettings, DEFAULT_RANK_THRESHOLD};
use crate::scenario::{db_to_linear, dbm_to_watts, FadingConfig, Geometry, Scenario, SystemParams};

/// The reference configuration.
pub const DEFAULT_CONFIG: &str = "m = 64\nl = 4\nn = 100\nk = 4\n";

const DEFAULT_N_SYMBOLS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub m: usize,
    pub l: usize,
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default = "defaults::power_dbm")]
    pub power_dbm: f64,
    #[serde(default = "defaults::noise_dbm")]
    pub noise_dbm: f64,
    #[serde(default = "defaults::carrier_ghz")]
    pub carrier_ghz: f64,
    #[serde(default = "defaults::rician_k_db")]
    pub rician_k_db: f64,
    #[serde(default)]
    pub positions: Positions,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Positions {
    pub bs: Option<[f64; 3]>,
    pub is: Option<[f64; 3]>,
    pub user: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub trials: usize,
    pub samples: usize,
    pub rounds: usize,
    pub mode: String,
    pub n_symbols: Option<usize>,
    pub rank_threshold: f64,
    pub algorithms: Vec<String>,
    pub gap_algorithms: Vec<String>,
    pub m_grid: Vec<usize>,
    pub n_grid: Vec<usize>,
    pub gap_n_grid: Vec<usize>,
    pub t_grid: Vec<usize>,
    pub timing_n_grid: Vec<usize>,
    pub timing_runs: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let names = |algs: &[Algorithm]| algs.iter().map(|a| a.name().to_string()).collect();
        ExperimentSection {
            trials: 20,
            samples: 1000,
            rounds: 1,
            mode: "expected".into(),
            n_symbols: None,
            rank_threshold: DEFAULT_RANK_THRESHOLD,
            algorithms: names(&[
                Algorithm::Zps,
                Algorithm::LinearSearch,
                Algorithm::BlindCsm,
                Algorithm::BeamTraining,
                Algorithm::RankBeamTraining,
                Algorithm::RankCsm,
            ]),
            gap_algorithms: names(&[Algorithm::Zps]),
            m_grid: vec![8, 16, 32, 64],
            n_grid: vec![100, 200, 400, 600, 800],
            gap_n_grid: vec![100, 200, 400, 600, 800],
            t_grid: vec![100, 1000, 10_000, 100_000],
            timing_n_grid: vec![100, 200, 300],
            timing_runs: 7,
        }
    }
}

mod defaults {
    pub fn power_dbm() -> f64 {
        30.0
    }
    pub fn noise_dbm() -> f64 {
        -90.0
    }
    pub fn carrier_ghz() -> f64 {
        2.6
    }
    pub fn rician_k_db() -> f64 {
        crate::scenario::FadingConfig::DEFAULT_RICIAN_K_DB
    }
    pub fn seed() -> u64 {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// Invalid or inconsistent parameter.
    Config,
    /// Valid parameters whose search space exceeds a budget.
    Guard,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub key: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

/// Splits `key=value`, parsing the value as a TOML value and falling back to a
/// bare string.
pub fn parse_override(text: &str) -> Result<(String, toml::Value)> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{text}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("override `{text}` has an empty key")));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    Ok((key.to_string(), value))
}

fn apply_override(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("non-empty key");
    let mut cur = table;
    for part in parts {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override key `{key}`: `{part}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl FileConfig {
    /// Parses TOML text after applying `overrides` (dotted keys).
    pub fn from_toml(text: &str, overrides: &[(String, toml::Value)]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for (key, value) in overrides {
            apply_override(&mut table, key, value.clone())?;
        }
        table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))
    }

    /// Reads `path`, or the reference configuration when `None`.
    pub fn load(path: Option<&Path>, overrides: &[(String, toml::Value)]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
            None => DEFAULT_CONFIG.to_string(),
        };
        Self::from_toml(&text, overrides)
    }

    pub fn scenario(&self) -> Scenario {
        let carrier = self.carrier_ghz * 1e9;
        let mut params = SystemParams::new(
            self.m,
            self.l,
            self.n,
            self.k,
            dbm_to_watts(self.power_dbm),
            dbm_to_watts(self.noise_dbm),
            carrier,
        );
        if let Some(s) = self.s {
            params.s = s;
        }
        let geometry = Geometry::with_positions(
            self.positions.bs.unwrap_or(Geometry::DEFAULT_BS),
            self.positions.is.unwrap_or(Geometry::DEFAULT_IS),
            self.positions.user.unwrap_or(Geometry::DEFAULT_USER),
            carrier,
        );
        Scenario {
            params,
            geometry,
            fading: FadingConfig::with_rician_k(db_to_linear(self.rician_k_db)),
        }
    }

    pub fn mode(&self) -> Result<MeasurementMode> {
        let ex = &self.experiment;
        match ex.mode.as_str() {
            "expected" => Ok(MeasurementMode::Expected),
            "sampled" => Ok(MeasurementMode::Sampled {
                n_symbols: ex.n_symbols.unwrap_or(DEFAULT_N_SYMBOLS),
            }),
            other => Err(Error::invalid(
                "mode",
                format!("unknown measurement mode `{other}` (expected `expected` or `sampled`)"),
            )),
        }
    }

    fn algorithms(&self, study: Study) -> Result<Vec<Algorithm>> {
        let names = match study {
            Study::Gap => &self.experiment.gap_algorithms,
            _ => &self.experiment.algorithms,
        };
        names.iter().map(|s| s.parse()).collect()
    }

    fn grid(&self, study: Study) -> Vec<usize> {
        let ex = &self.experiment;
        match study {
            Study::Single => Vec::new(),
            Study::SweepM => ex.m_grid.clone(),
            Study::SweepN => ex.n_grid.clone(),
            Study::Gap => ex.gap_n_grid.clone(),
            Study::Prop1 => ex.t_grid.clone(),
            Study::Timing => ex.timing_n_grid.clone(),
        }
    }

    /// Experiment spec for `study`, without validating it.
    pub fn spec(&self, study: Study) -> Result<ExperimentSpec> {
        let ex = &self.experiment;
        Ok(ExperimentSpec {
            scenario: self.scenario(),
            grid: self.grid(study),
            trials: ex.trials,
            algorithms: self.algorithms(study)?,
            settings: PassiveSettings {
                samples: ex.samples,
                mode: self.mode()?,
                rank_threshold: ex.rank_threshold,
            },
            rounds: ex.rounds,
            streams: self.s,
            master_seed: self.seed,
            timing_runs: ex.timing_runs,
        })
    }

    /// Every problem that would stop `study` from running, without running it.
    pub fn diagnostics(&self, study: Study) -> Vec<Diagnostic> {
        let config = |key: &str, message: String| Diagnostic {
            kind: DiagnosticKind::Config,
            key: key.to_string(),
            message,
        };
        let mut out = Vec::new();
        if let Err(e) = self.mode() {
            out.push(config("mode", e.to_string()));
        }
        if let Err(e) = self.algorithms(study) {
            let key = if study == Study::Gap {
                "gap_algorithms"
            } else {
                "algorithms"
            };
            out.push(config(key, e.to_string()));
        }
        if !out.is_empty() {
            return out;
        }
        let spec = self.spec(study).expect("mode and algorithms checked");
        let grid_key = match study {
            Study::SweepM => "m_grid",
            Study::SweepN => "n_grid",
            Study::Gap => "gap_n_grid",
            Study::Prop1 => "t_grid",
            Study::Timing => "timing_n_grid",
            Study::Single => "grid",
        };
        for (key, message) in spec.violations(study) {
            let key = if key == "grid" { grid_key } else { key };
            out.push(config(key, message));
        }
        for (key, message) in spec.guard_violations(study) {
            out.push(Diagnostic {
                kind: DiagnosticKind::Guard,
                key: key.to_string(),
                message,
            });
        }
        out
    }
}

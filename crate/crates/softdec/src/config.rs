//! Experiment configuration: one JSON document, overridable flag by flag.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use crate::error::AppError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Repetition,
    Estimation,
    Calibrate,
    Tabulate,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Repetition => "repetition",
            Self::Estimation => "estimation",
            Self::Calibrate => "calibrate",
            Self::Tabulate => "tabulate",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutKind {
    #[default]
    Gaussian,
    PeakSignal,
    TabulatedFile,
}

impl ReadoutKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::PeakSignal => "peak-signal",
            Self::TabulatedFile => "tabulated-file",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Peak-signal model settings. Times are in the same unit as
/// `mean_turn_on`. Leaving `meas_time` and `bin_time` unset optimizes them
/// for each SNR.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeakConfig {
    pub mean_turn_on: f64,
    pub mean_duration: f64,
    pub meas_time: Option<f64>,
    pub bin_time: Option<f64>,
    /// Pulse draws for the tabulated densities.
    pub tabulation_samples: usize,
    pub grid_size: usize,
    /// Pulse draws per candidate in the parameter search.
    pub search_samples: usize,
}

impl Default for PeakConfig {
    fn default() -> Self {
        Self {
            mean_turn_on: 1.0,
            mean_duration: 4.0,
            meas_time: None,
            bin_time: None,
            tabulation_samples: 100_000,
            grid_size: 1024,
            search_samples: 10_000,
        }
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

/// Everything a run needs. `workers`, `out` and `format` do not influence
/// results and are left out of the config hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub readout: ReadoutKind,
    /// Table file read by the `tabulated-file` readout, or written by
    /// `calibrate`.
    pub table: Option<PathBuf>,
    #[serde(deserialize_with = "one_or_many")]
    pub snr: Vec<f64>,
    pub eta: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub trials: u64,
    pub records: u64,
    pub n_per_record: usize,
    #[serde(deserialize_with = "one_or_many")]
    pub s0: Vec<f64>,
    pub seed: Option<u64>,
    /// 0 uses every core.
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub peak: PeakConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            readout: ReadoutKind::Gaussian,
            table: None,
            snr: vec![2.0],
            eta: 0.0,
            n_min: 1,
            n_max: 9,
            trials: 1_000_000,
            records: 50_000,
            n_per_record: 100,
            s0: vec![0.0],
            seed: None,
            workers: 0,
            out: None,
            format: OutputFormat::Csv,
            peak: PeakConfig::default(),
        }
    }
}

/// Result-determining part of the configuration, hashed for provenance.
#[derive(Serialize)]
struct HashedFields<'a> {
    experiment: Experiment,
    readout: ReadoutKind,
    table_sha256: Option<String>,
    snr: &'a [f64],
    eta: f64,
    n_min: usize,
    n_max: usize,
    trials: u64,
    records: u64,
    n_per_record: usize,
    s0: &'a [f64],
    seed: u64,
    peak: &'a PeakConfig,
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// A validated configuration for one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub seed: u64,
    /// First 16 hex digits of the SHA-256 of the result-determining fields.
    pub hash: String,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = fs::read_to_string(path).map_err(|source| AppError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|message| AppError::Input {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Checks every field for `experiment` and reports all problems at once.
    pub fn resolve(self, experiment: Experiment) -> Result<RunConfig, AppError> {
        let mut issues = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                issues.push(msg);
            }
        };
        if let Some(e) = self.experiment {
            check(e == experiment, format!("experiment: config says {e} but the subcommand is {experiment}"));
        }
        check(self.seed.is_some(), "seed: required (set it in the config or pass --seed)".into());
        check(!self.snr.is_empty(), "snr: needs at least one value".into());
        for &r in &self.snr {
            check(r.is_finite() && r > 0.0, format!("snr: {r} is not a positive finite number"));
        }
        check((0.0..=0.5).contains(&self.eta), format!("eta: {} is outside [0, 0.5]", self.eta));
        check(self.n_min >= 1, "n_min: must be at least 1".into());
        check(self.n_max >= self.n_min, format!("n_max: {} is below n_min {}", self.n_max, self.n_min));
        check(self.trials >= 1, "trials: must be at least 1".into());
        check(self.records >= 1, "records: must be at least 1".into());
        check(self.n_per_record >= 1, "n_per_record: must be at least 1".into());
        check(!self.s0.is_empty(), "s0: needs at least one value".into());
        for &s in &self.s0 {
            check((-1.0..=1.0).contains(&s), format!("s0: {s} is outside [-1, 1]"));
        }
        let p = &self.peak;
        for (name, v) in [("mean_turn_on", p.mean_turn_on), ("mean_duration", p.mean_duration)] {
            check(v.is_finite() && v > 0.0, format!("peak.{name}: {v} is not a positive finite number"));
        }
        for (name, v) in [("meas_time", p.meas_time), ("bin_time", p.bin_time)] {
            if let Some(v) = v {
                check(v.is_finite() && v > 0.0, format!("peak.{name}: {v} is not a positive finite number"));
            }
        }
        check(
            p.meas_time.is_some() == p.bin_time.is_some(),
            "peak: set both meas_time and bin_time, or neither".into(),
        );
        if let (Some(m), Some(b)) = (p.meas_time, p.bin_time) {
            check(b <= m, format!("peak.bin_time: {b} exceeds meas_time {m}"));
        }
        check(p.tabulation_samples >= 1, "peak.tabulation_samples: must be at least 1".into());
        check(p.search_samples >= 1, "peak.search_samples: must be at least 1".into());
        check(p.grid_size >= 2, "peak.grid_size: must be at least 2".into());
        match experiment {
            Experiment::Calibrate | Experiment::Tabulate => {
                check(
                    self.readout == ReadoutKind::PeakSignal,
                    format!("readout: {experiment} needs peak-signal, not {}", self.readout.name()),
                );
            }
            _ => {}
        }
        if self.readout == ReadoutKind::TabulatedFile {
            check(self.table.is_some(), "table: the tabulated-file readout needs a table path".into());
        }
        if experiment == Experiment::Calibrate {
            check(self.table.is_some(), "table: calibrate needs a path for the tabulated readout".into());
        }
        if experiment == Experiment::Tabulate {
            check(self.snr.len() == 1, "snr: tabulate takes a single value".into());
        }
        if !issues.is_empty() {
            return Err(AppError::Config(issues));
        }

        let table_sha256 = match (self.readout, &self.table) {
            (ReadoutKind::TabulatedFile, Some(path)) => {
                let bytes = fs::read(path).map_err(|source| AppError::Read {
                    path: path.clone(),
                    source,
                })?;
                Some(sha256_hex(&bytes))
            }
            _ => None,
        };
        let seed = self.seed.expect("checked above");
        let fields = HashedFields {
            experiment,
            readout: self.readout,
            table_sha256,
            snr: &self.snr,
            eta: self.eta,
            n_min: self.n_min,
            n_max: self.n_max,
            trials: self.trials,
            records: self.records,
            n_per_record: self.n_per_record,
            s0: &self.s0,
            seed,
            peak: &self.peak,
        };
        let json = serde_json::to_vec(&fields).expect("config serializes");
        let hash = sha256_hex(&json)[..16].to_string();
        Ok(RunConfig {
            experiment,
            config: self,
            seed,
            hash,
        })
    }
}

//! JSON file format for tabulated readout densities.
//!
//! ```json
//! {
//!   "version": 1,
//!   "grid": [...],
//!   "pdf_plus": [...],
//!   "pdf_minus": [...],
//!   "params": {"snr": 2.0, "mean_turn_on": 1.0, ...},
//!   "provenance": {"n_samples": 100000, "seed": 7}
//! }
//! ```
//!
//! Only `params.snr` is required among the parameters; the peak-signal
//! fields are recorded when the table comes from the pulse model. Files are
//! validated on load: version, equal lengths, a strictly increasing grid,
//! non-negative finite densities and unit mass (to `1e-6`) for both states.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use softdec_core::readout::PeakTabulation;
use softdec_core::{QubitState, TabulatedReadout};

use crate::error::AppError;

pub const TABLE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub version: u32,
    pub grid: Vec<f64>,
    pub pdf_plus: Vec<f64>,
    pub pdf_minus: Vec<f64>,
    pub params: TableParams,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableParams {
    pub snr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_turn_on: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meas_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_weight: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub n_samples: usize,
    pub seed: u64,
}

impl TableFile {
    pub fn from_tabulation(tab: &PeakTabulation) -> Self {
        let p = &tab.params;
        Self {
            version: TABLE_VERSION,
            grid: tab.readout.grid().to_vec(),
            pdf_plus: tab.readout.pdf_table(QubitState::Plus).to_vec(),
            pdf_minus: tab.readout.pdf_table(QubitState::Minus).to_vec(),
            params: TableParams {
                snr: p.snr(),
                mean_turn_on: Some(p.mean_turn_on()),
                mean_duration: Some(p.mean_duration()),
                meas_time: Some(p.meas_time()),
                bin_time: Some(p.bin_time()),
                n_bins: Some(p.n_bins()),
                tail_weight: Some(tab.settings.tail_weight),
            },
            provenance: Provenance {
                n_samples: tab.settings.n_samples,
                seed: tab.settings.seed,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let file: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if file.version != TABLE_VERSION {
            return Err(format!("unsupported table version {} (expected {TABLE_VERSION})", file.version));
        }
        file.readout()?;
        Ok(file)
    }

    /// Reads and validates a table file.
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = fs::read_to_string(path).map_err(|source| AppError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|message| AppError::Input {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), AppError> {
        fs::write(path, self.to_json()).map_err(|e| AppError::Write {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn readout(&self) -> Result<TabulatedReadout, String> {
        if !(self.params.snr.is_finite() && self.params.snr > 0.0) {
            return Err("params.snr must be positive and finite".into());
        }
        TabulatedReadout::new(self.grid.clone(), self.pdf_plus.clone(), self.pdf_minus.clone()).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TableFile {
        TableFile {
            version: TABLE_VERSION,
            grid: vec![0.0, 1.0, 2.0],
            pdf_plus: vec![0.0, 0.0, 2.0],
            pdf_minus: vec![2.0, 0.0, 0.0],
            params: TableParams {
                snr: 2.0,
                mean_turn_on: None,
                mean_duration: None,
                meas_time: None,
                bin_time: None,
                n_bins: None,
                tail_weight: None,
            },
            provenance: Provenance { n_samples: 0, seed: 0 },
        }
    }

    #[test]
    fn round_trip() {
        let file = sample();
        let back = TableFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert!(!file.to_json().contains("mean_turn_on"));
    }

    #[test]
    fn rejects_bad_tables() {
        let mut f = sample();
        f.version = 2;
        assert!(TableFile::parse(&f.to_json()).unwrap_err().contains("version"));
        let mut f = sample();
        f.pdf_plus.pop();
        assert!(TableFile::parse(&f.to_json()).is_err());
        let mut f = sample();
        f.pdf_minus = vec![4.0, 0.0, 0.0];
        assert!(TableFile::parse(&f.to_json()).is_err());
        let mut f = sample();
        f.grid = vec![0.0, 2.0, 1.0];
        assert!(TableFile::parse(&f.to_json()).is_err());
        let text = sample().to_json().replace("\"version\"", "\"extra\": 1, \"version\"");
        assert!(TableFile::parse(&text).is_err());
    }
}

//! The experiments behind the CLI subcommands.

use std::path::{Path, PathBuf};

use serde::Serialize;
use softdec_core::estimation::{asymptotic_mse, mse_monte_carlo, ExpectationValue, Method};
use softdec_core::numerics::QuadratureSpec;
use softdec_core::readout::{
    optimize_peak_parameters, tabulate_peak_distributions, PeakSearchGrid, PeakTabulation, TabulationSettings,
};
use softdec_core::repcode::{
    estimate_error_rate_mc, gaussian_majority_error, gaussian_soft_error, DecodingMode, EncodingChannel,
};
use softdec_core::{Executor, GaussianReadout, PeakSignalParams, Readout, ReadoutModel};

use crate::config::{ReadoutKind, RunConfig};
use crate::error::AppError;
use crate::table::TableFile;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepetitionRow {
    pub readout: &'static str,
    pub snr: f64,
    pub mode: &'static str,
    pub n: usize,
    pub eta: f64,
    pub trials: u64,
    pub errors: u64,
    pub rate: f64,
    pub std_err: f64,
    pub seed: u64,
    /// Closed-form rate; only for the Gaussian readout without encoding errors.
    pub analytic_rate: Option<f64>,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MseRow {
    pub readout: &'static str,
    pub snr: f64,
    pub s0: f64,
    pub method: &'static str,
    pub n_per_record: usize,
    pub n_records: u64,
    pub variance: f64,
    pub bias: f64,
    pub mse: f64,
    pub normalized_mse: f64,
    /// Missing for SD at `s0 = +-1`, where the large-N formula does not apply.
    pub asymptotic_normalized_mse: Option<f64>,
    pub seed: u64,
    pub clamped: u64,
    pub failures: u64,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub readout: &'static str,
    pub snr: f64,
    pub mean_turn_on: f64,
    pub mean_duration: f64,
    pub meas_time: f64,
    pub bin_time: f64,
    pub n_bins: usize,
    pub threshold: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub average_error: f64,
    pub table: String,
    pub seed: u64,
    pub config_hash: String,
}

fn mode_name(mode: DecodingMode) -> &'static str {
    match mode {
        DecodingMode::Analog => "analog",
        DecodingMode::Thresholded => "thresholded",
    }
}

/// A readout ready for the harnesses, with the SNR it was built for.
pub struct PreparedReadout {
    pub snr: f64,
    pub model: ReadoutModel,
}

/// Peak-signal parameters for `snr`: the configured window and bin time,
/// or the optimum of the default search.
pub fn peak_parameters<E: Executor>(run: &RunConfig, snr: f64, exec: &E) -> Result<PeakSignalParams, AppError> {
    let p = &run.config.peak;
    match (p.meas_time, p.bin_time) {
        (Some(m), Some(b)) => Ok(PeakSignalParams::new(p.mean_turn_on, p.mean_duration, snr, m, b)?),
        _ => {
            let base = PeakSignalParams::new(p.mean_turn_on, p.mean_duration, snr, p.mean_turn_on, p.mean_turn_on)?;
            let grid = PeakSearchGrid {
                n_samples: p.search_samples,
                ..PeakSearchGrid::default_for(&base)
            };
            Ok(optimize_peak_parameters(&base, &grid, run.seed, exec)?.params)
        }
    }
}

/// Tabulated peak-signal densities at `params`.
pub fn peak_tabulation<E: Executor>(run: &RunConfig, params: &PeakSignalParams, exec: &E) -> Result<PeakTabulation, AppError> {
    let settings = TabulationSettings {
        n_samples: run.config.peak.tabulation_samples,
        grid_size: run.config.peak.grid_size,
        seed: run.seed,
        ..TabulationSettings::default()
    };
    let tab = tabulate_peak_distributions(params, &settings, exec)?;
    for w in &tab.warnings {
        eprintln!("warning: {w:?}");
    }
    Ok(tab)
}

pub fn prepare_readouts<E: Executor>(run: &RunConfig, exec: &E) -> Result<Vec<PreparedReadout>, AppError> {
    let cfg = &run.config;
    match cfg.readout {
        ReadoutKind::Gaussian => cfg
            .snr
            .iter()
            .map(|&snr| {
                Ok(PreparedReadout {
                    snr,
                    model: GaussianReadout::new(snr)?.into(),
                })
            })
            .collect(),
        ReadoutKind::PeakSignal => cfg
            .snr
            .iter()
            .map(|&snr| {
                let params = peak_parameters(run, snr, exec)?;
                let tab = peak_tabulation(run, &params, exec)?;
                Ok(PreparedReadout {
                    snr,
                    model: tab.readout.into(),
                })
            })
            .collect(),
        ReadoutKind::TabulatedFile => {
            let path = cfg.table.as_deref().expect("validated");
            let file = TableFile::load(path)?;
            let model = file.readout().map_err(|message| AppError::Input {
                path: path.to_path_buf(),
                message,
            })?;
            Ok(vec![PreparedReadout {
                snr: file.params.snr,
                model: model.into(),
            }])
        }
    }
}

/// Error rates for every `n` in range and both decoding modes.
pub fn run_repetition<E: Executor>(run: &RunConfig, exec: &E) -> Result<Vec<RepetitionRow>, AppError> {
    let cfg = &run.config;
    let channel = EncodingChannel::new(cfg.eta)?;
    let mut rows = Vec::new();
    for readout in prepare_readouts(run, exec)? {
        for n in cfg.n_min..=cfg.n_max {
            for mode in [DecodingMode::Analog, DecodingMode::Thresholded] {
                let est = estimate_error_rate_mc(&readout.model, mode, n, channel, cfg.trials, run.seed, exec)?;
                let analytic_rate = match (&readout.model, mode) {
                    (ReadoutModel::Gaussian(_), DecodingMode::Analog) if cfg.eta == 0.0 => {
                        Some(gaussian_soft_error(readout.snr, n)?)
                    }
                    (ReadoutModel::Gaussian(_), DecodingMode::Thresholded) if cfg.eta == 0.0 => {
                        Some(gaussian_majority_error(readout.snr, n)?)
                    }
                    _ => None,
                };
                rows.push(RepetitionRow {
                    readout: cfg.readout.name(),
                    snr: readout.snr,
                    mode: mode_name(mode),
                    n,
                    eta: cfg.eta,
                    trials: est.trials,
                    errors: est.errors,
                    rate: est.rate,
                    std_err: est.std_err,
                    seed: run.seed,
                    analytic_rate,
                    config_hash: run.hash.clone(),
                });
            }
        }
    }
    Ok(rows)
}

/// Monte Carlo and asymptotic MSE for every SNR, `s0` and method.
pub fn run_estimation<E: Executor>(run: &RunConfig, exec: &E) -> Result<Vec<MseRow>, AppError> {
    let cfg = &run.config;
    let spec = QuadratureSpec::default();
    let mut rows = Vec::new();
    for readout in prepare_readouts(run, exec)? {
        for &s in &cfg.s0 {
            let s0 = ExpectationValue::new(s)?;
            for method in Method::ALL {
                let asymptotic = if method == Method::SoftDecoded && s.abs() == 1.0 {
                    None
                } else {
                    Some(asymptotic_mse(&readout.model, s0, method, &spec)?)
                };
                let rep = mse_monte_carlo(&readout.model, s0, method, cfg.n_per_record, cfg.records, run.seed, exec)?;
                rows.push(MseRow {
                    readout: cfg.readout.name(),
                    snr: readout.snr,
                    s0: s,
                    method: method.abbreviation(),
                    n_per_record: rep.n_per_record,
                    n_records: rep.n_records,
                    variance: rep.variance,
                    bias: rep.bias,
                    mse: rep.mse,
                    normalized_mse: rep.normalized_mse,
                    asymptotic_normalized_mse: asymptotic,
                    seed: run.seed,
                    clamped: rep.clamped,
                    failures: rep.failures,
                    config_hash: run.hash.clone(),
                });
            }
        }
    }
    Ok(rows)
}

/// Where the table for `snr` goes when `count` SNR values are calibrated:
/// `base` itself for one value, otherwise `base` with `-snr<r>` before the
/// extension.
pub fn table_path_for(base: &Path, snr: f64, count: usize) -> PathBuf {
    if count == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}-snr{snr}.{}", ext.to_string_lossy()),
        None => format!("{stem}-snr{snr}"),
    };
    base.with_file_name(name)
}

/// Optimizes the peak-signal readout for every SNR, writes the tabulated
/// densities and reports the thresholded error rates of the table.
pub fn run_calibrate<E: Executor>(run: &RunConfig, exec: &E) -> Result<Vec<CalibrationRow>, AppError> {
    let cfg = &run.config;
    let base = cfg.table.as_deref().expect("validated");
    let mut rows = Vec::new();
    for &snr in &cfg.snr {
        let params = peak_parameters(run, snr, exec)?;
        let tab = peak_tabulation(run, &params, exec)?;
        let path = table_path_for(base, snr, cfg.snr.len());
        TableFile::from_tabulation(&tab).save(&path)?;
        let threshold = tab.readout.optimal_threshold()?;
        let rates = tab.readout.conditional_error_rates(threshold);
        rows.push(CalibrationRow {
            readout: cfg.readout.name(),
            snr,
            mean_turn_on: params.mean_turn_on(),
            mean_duration: params.mean_duration(),
            meas_time: params.meas_time(),
            bin_time: params.bin_time(),
            n_bins: params.n_bins(),
            threshold,
            eps_plus: rates.eps_plus,
            eps_minus: rates.eps_minus,
            average_error: rates.average(),
            table: path.display().to_string(),
            seed: run.seed,
            config_hash: run.hash.clone(),
        });
    }
    Ok(rows)
}

/// Tabulated peak-signal densities as a table file.
pub fn run_tabulate<E: Executor>(run: &RunConfig, exec: &E) -> Result<TableFile, AppError> {
    let params = peak_parameters(run, run.config.snr[0], exec)?;
    let tab = peak_tabulation(run, &params, exec)?;
    Ok(TableFile::from_tabulation(&tab))
}

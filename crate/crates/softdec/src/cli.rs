use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Experiment, ExperimentConfig, OutputFormat, ReadoutKind, RunConfig};
use crate::error::AppError;
use crate::experiments::{run_calibrate, run_estimation, run_repetition, run_tabulate};
use crate::output::{emit, render};
use crate::parallel::Parallel;

#[derive(Parser, Debug)]
#[command(name = "softdec", version, about = "Soft- versus hard-decision decoding of qubit readout")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Logical error rates of the repetition code, analog and thresholded.
    Repetition(Overrides),
    /// Mean squared error of the TA, SA and SD estimators of s0.
    Estimation(Overrides),
    /// Optimize and tabulate the peak-signal readout, writing --table.
    Calibrate(Overrides),
    /// Write the tabulated peak-signal readout as JSON.
    Tabulate(Overrides),
}

/// Each flag overrides the config key of the same name.
#[derive(Args, Debug, Default)]
#[command(allow_negative_numbers = true)]
struct Overrides {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    readout: Option<ReadoutKind>,
    /// Table file for the tabulated-file readout; output path for calibrate.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Signal-to-noise ratio; a comma-separated list sweeps it.
    #[arg(long, value_delimiter = ',')]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    records: Option<u64>,
    #[arg(long)]
    n_per_record: Option<usize>,
    /// Comma-separated expectation values.
    #[arg(long, value_delimiter = ',')]
    s0: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core. Does not affect results.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

impl Overrides {
    fn apply(self) -> Result<ExperimentConfig, AppError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    c.$field = v;
                }
            )*};
        }
        set!(readout, snr, eta, n_min, n_max, trials, records, n_per_record, s0, workers, format);
        if self.table.is_some() {
            c.table = self.table;
        }
        if self.seed.is_some() {
            c.seed = self.seed;
        }
        if self.out.is_some() {
            c.out = self.out;
        }
        Ok(c)
    }
}

fn execute(experiment: Experiment, overrides: Overrides) -> Result<(), AppError> {
    let run: RunConfig = overrides.apply()?.resolve(experiment)?;
    let exec = Parallel::new(run.config.workers).map_err(|e| AppError::config(format!("workers: {e}")))?;
    let out = run.config.out.as_deref();
    let format = run.config.format;
    let bytes = match experiment {
        Experiment::Repetition => render(&run_repetition(&run, &exec)?, format),
        Experiment::Estimation => render(&run_estimation(&run, &exec)?, format),
        Experiment::Calibrate => render(&run_calibrate(&run, &exec)?, format),
        Experiment::Tabulate => Ok(run_tabulate(&run, &exec)?.to_json().into_bytes()),
    }
    .map_err(|message| AppError::Write {
        path: out.map_or_else(|| "<stdout>".into(), PathBuf::from),
        message,
    })?;
    emit(&bytes, out)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (experiment, overrides) = match cli.command {
        Command::Repetition(o) => (Experiment::Repetition, o),
        Command::Estimation(o) => (Experiment::Estimation, o),
        Command::Calibrate(o) => (Experiment::Calibrate, o),
        Command::Tabulate(o) => (Experiment::Tabulate, o),
    };
    match execute(experiment, overrides) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

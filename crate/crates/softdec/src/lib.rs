//! Experiment runner for [`softdec_core`]: a thread-pool executor, the
//! tabulated-readout file format, JSON configuration and CSV/JSON output,
//! and the `softdec` command line.
//!
//! ```text
//! softdec repetition --readout gaussian --snr 2 --eta 0.01 --trials 10000000 --seed 1
//! softdec estimation --snr 0.25,1,4,16 --s0 0 --seed 1 --format json
//! softdec calibrate --readout peak-signal --snr 2 --table peak.json --seed 1
//! ```
//!
//! Results depend only on the configuration and seed, never on `--workers`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod parallel;
pub mod table;

pub use config::{Experiment, ExperimentConfig, OutputFormat, ReadoutKind, RunConfig};
pub use error::AppError;
pub use parallel::Parallel;
pub use table::TableFile;

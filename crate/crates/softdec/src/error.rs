use std::io;
use std::path::PathBuf;

/// Failure of a CLI run, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("invalid configuration:\n{}", format_items(.0))]
    Config(Vec<String>),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] softdec_core::Error),
}

fn format_items(items: &[String]) -> String {
    items.iter().map(|i| format!("  - {i}")).collect::<Vec<_>>().join("\n")
}

impl AppError {
    pub fn config(item: impl Into<String>) -> Self {
        Self::Config(vec![item.into()])
    }

    /// 2 for bad input (configuration or input files), 3 for numerical
    /// failures, 1 when output cannot be written.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Read { .. } | Self::Input { .. } => 2,
            Self::Numerical(_) => 3,
            Self::Write { .. } => 1,
        }
    }
}

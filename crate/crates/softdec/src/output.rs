use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::AppError;

/// Rows as CSV with a header line, or as a pretty-printed JSON array.
pub fn render<T: Serialize>(rows: &[T], format: OutputFormat) -> Result<Vec<u8>, String> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())
        }
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(rows).map_err(|e| e.to_string())?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), AppError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| AppError::Write {
            path: p.to_path_buf(),
            message: e.to_string(),
        }),
        None => io::stdout().lock().write_all(bytes).map_err(|e| AppError::Write {
            path: "<stdout>".into(),
            message: e.to_string(),
        }),
    }
}

//! CSV and JSON writers for plot-ready data.
//!
//! CSV: UTF-8, LF line endings, one header row naming each column with its
//! unit, floats in scientific notation with 17 significant digits.

use std::fs;
use std::io::Write;
use std::path::Path;

use aqpe_core::SpectralEstimate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Mode};
use crate::error::{CliError, CliResult};

pub const THETA: &str = "theta_rad";
pub const WIGNER: &str = "wigner_value";
pub const RE_ALPHA: &str = "re_alpha";
pub const IM_ALPHA: &str = "im_alpha";
pub const TIME: &str = "time_s";
pub const FIDELITY: &str = "fidelity";
pub const ENERGY: &str = "energy_rad_per_s";
pub const WEIGHT: &str = "weight";
pub const LEAKAGE: &str = "coupler_leakage";

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV document as bytes.
pub fn csv_bytes<I>(header: &[&str], rows: I) -> CliResult<Vec<u8>>
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Format {
        path: "<csv>".into(),
        message: e.to_string(),
    };
    w.write_record(header).map_err(fail)?;
    for row in rows {
        let row = row.as_ref();
        if row.len() != header.len() {
            return Err(CliError::Format {
                path: "<csv>".into(),
                message: format!("row has {} fields, header has {}", row.len(), header.len()),
            });
        }
        w.write_record(row.iter().map(|&x| format_float(x)))
            .map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Format {
        path: "<csv>".into(),
        message: e.to_string(),
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

pub fn export_csv<I>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let bytes = csv_bytes(header, rows).map_err(|e| match e {
        CliError::Format { message, .. } => CliError::Format {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })?;
    write_bytes(path, &bytes)
}

pub fn export_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSnapshot {
    pub time_s: f64,
    pub estimate: SpectralEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineEstimates {
    pub pipeline: Mode,
    pub snapshots: Vec<EstimateSnapshot>,
}

/// Spectral estimates of one run with the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatesDocument {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub pipelines: Vec<PipelineEstimates>,
}

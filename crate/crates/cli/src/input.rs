//! Parsing of command-line values: parameter vectors, config files and
//! sample files.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use grd_core::{NegativeWeightPolicy, SeriesConfig};
use serde::Deserialize;

use crate::report::CliError;

/// Reads a JSON value given inline or as a path to a file holding it.
fn inline_or_file(raw: &str) -> Result<String, CliError> {
    let trimmed = raw.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        return Ok(raw.to_string());
    }
    fs::read_to_string(Path::new(raw)).map_err(|e| CliError::malformed(format!("cannot read `{raw}`: {e}")))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorFile {
    Bare(Vec<f64>),
    Keyed { a: Vec<f64> },
}

/// A real vector as a JSON array, or a file containing one (optionally as
/// `{"a": [...]}`).
pub fn real_vector(raw: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let text = inline_or_file(raw)?;
    match serde_json::from_str::<VectorFile>(&text) {
        Ok(VectorFile::Bare(v)) | Ok(VectorFile::Keyed { a: v }) => Ok(v),
        Err(e) => Err(CliError::malformed(format!("{what} must be a JSON array of numbers: {e}"))),
    }
}

pub fn integer_vector(raw: &str, what: &str) -> Result<Vec<u32>, CliError> {
    serde_json::from_str(raw)
        .map_err(|e| CliError::malformed(format!("{what} must be a JSON array of nonnegative integers: {e}")))
}

/// Defaults read from `--config`. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub tol: Option<f64>,
    pub max_k: Option<usize>,
    pub cap: Option<u128>,
    pub policy: Option<String>,
}

pub fn load_config(path: Option<&str>) -> Result<ConfigFile, CliError> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::malformed(format!("cannot read `{path}`: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::malformed(format!("bad config `{path}`: {e}")))
}

impl ConfigFile {
    /// Series settings with the file's values over the library defaults.
    pub fn series(&self) -> Result<SeriesConfig, CliError> {
        let mut cfg = SeriesConfig::default();
        if let Some(k) = self.k {
            cfg.sample_k = k;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(m) = self.max_k {
            cfg.max_k = m;
        }
        if let Some(c) = self.cap {
            cfg.cap = c;
        }
        if let Some(p) = &self.policy {
            cfg.policy = match p.as_str() {
                "clip" => NegativeWeightPolicy::Clip,
                "reject" => NegativeWeightPolicy::Reject,
                other => return Err(CliError::malformed(format!("unknown policy `{other}`; use clip or reject"))),
            };
        }
        Ok(cfg)
    }
}

/// Rows of a CSV file with a `y1,...` header, or of JSONL arrays. `-`
/// reads standard input.
pub fn read_samples(path: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut text = String::new();
    if path == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::malformed(format!("cannot read standard input: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| CliError::malformed(format!("cannot read `{path}`: {e}")))?;
    }
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('y')) {
            continue;
        }
        let row: Result<Vec<f64>, String> = if line.starts_with('[') {
            serde_json::from_str(line).map_err(|e| e.to_string())
        } else {
            line.split(',').map(|v| v.trim().parse::<f64>().map_err(|e| e.to_string())).collect()
        };
        rows.push(row.map_err(|e| CliError::malformed(format!("sample line {}: {e}", i + 1)))?);
    }
    Ok(rows)
}

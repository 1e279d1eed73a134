//! Persisted run records, one JSON object per line.

use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use trp_core::optimize::{OptimizationResult, ScanRow};
use trp_core::propagate::ConvergenceReport;
use trp_core::{GateMetrics, UnitaryMatrix};

use crate::config::{Command, RunConfig};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Output directory override.
pub const OUTPUT_DIR_ENV: &str = "TRP_OUTPUT_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixParts {
    /// Real parts, one array per row.
    pub re: Vec<Vec<f64>>,
    /// Imaginary parts, one array per row.
    pub im: Vec<Vec<f64>>,
}

impl MatrixParts {
    pub fn of(u: &UnitaryMatrix) -> Self {
        let m = u.as_matrix();
        Self {
            re: m.real_rows(),
            im: m.imag_rows(),
        }
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }
}

/// Ladder results attached to a `converge` record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub integrator: ConvergenceReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subintervals: Option<ConvergenceReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub command: Command,
    #[serde(with = "utc_seconds")]
    pub timestamp: DateTime<Utc>,
    /// Config that reproduces `metrics` when simulated.
    pub config: RunConfig,
    pub metrics: GateMetrics,
    pub applied_gate: MatrixParts,
    pub seed: u64,
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimization: Option<OptimizationResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_row: Option<ScanRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSummary>,
}

mod utc_seconds {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Micros, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let s = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&s)
            .map(|t| t.with_timezone(&Utc))
            .map_err(serde::de::Error::custom)
    }
}

/// Where records go: `--out` wins; otherwise the configured or default file
/// name, placed under the override directory when that is set.
pub fn resolve_output(out: Option<&Path>, cfg: &RunConfig, command: Command, env_dir: Option<&Path>) -> PathBuf {
    if let Some(p) = out {
        return p.to_path_buf();
    }
    let configured = cfg.output_path.clone().unwrap_or_else(|| {
        let stem = cfg.name.as_deref().unwrap_or(command.as_str());
        PathBuf::from("runs").join(format!("{stem}.jsonl"))
    });
    match env_dir {
        Some(dir) => dir.join(configured.file_name().expect("output path names a file")),
        None => configured,
    }
}

/// Appends records to a JSONL file, creating parent directories.
pub struct RecordWriter {
    path: PathBuf,
}

impl RecordWriter {
    pub fn new(path: PathBuf) -> Self {
        Self { path }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, records: &[RunRecord]) -> Result<(), CliError> {
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut buf = Vec::new();
        for r in records {
            serde_json::to_writer(&mut buf, r).map_err(|e| CliError::Numerical(e.to_string()))?;
            buf.push(b'\n');
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        f.write_all(&buf)?;
        Ok(())
    }
}

/// Reads every record; lines with a newer schema are rejected.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, CliError> {
    let f = fs::File::open(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let head: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), i + 1)))?;
        match head.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            other => {
                return Err(CliError::Usage(format!(
                    "{}:{}: unsupported schema_version {other:?}",
                    path.display(),
                    i + 1
                )))
            }
        }
        let rec = serde_json::from_value(head)
            .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

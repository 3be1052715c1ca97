use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One algorithm's result. Sweep entries hold the mean over all sweep runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub algorithm: String,
    pub hosts_used: f64,
    pub vms_placed: f64,
    pub energy_kwh: f64,
    /// `(1 − energy / baseline energy) · 100`.
    pub saving_pct: f64,
    pub busy_time_s: f64,
    /// `energy / baseline energy`.
    pub normalized_energy: f64,
    pub unplaced: f64,
    pub fleet_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown report format {s:?} (csv, json, markdown)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no rows to report")]
    EmptyRows,
    #[error("writing {path}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub const COLUMNS: [&str; 9] = [
    "algorithm",
    "hosts",
    "vms",
    "kwh",
    "saving_pct",
    "busy_s",
    "normalized_energy",
    "unplaced",
    "fleet",
];

fn cells(row: &ComparisonRow) -> [String; 9] {
    [
        row.algorithm.clone(),
        row.hosts_used.to_string(),
        row.vms_placed.to_string(),
        format!("{:.6}", row.energy_kwh),
        format!("{:.2}", row.saving_pct),
        row.busy_time_s.to_string(),
        format!("{:.6}", row.normalized_energy),
        row.unplaced.to_string(),
        row.fleet_size.to_string(),
    ]
}

pub fn render_report(rows: &[ComparisonRow], format: ReportFormat) -> Result<String, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::EmptyRows);
    }
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS).expect("in-memory write");
            for row in rows {
                w.write_record(cells(row)).expect("in-memory write");
            }
            out = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
        }
        ReportFormat::Json => {
            out = serde_json::to_string_pretty(rows).expect("rows serialize");
            out.push('\n');
        }
        ReportFormat::Markdown => {
            out.push_str("| Algorithm | Hosts used | VMs | Energy (KWh) | Saving (%) | Busy (s) | Normalized energy | Unplaced | Fleet |\n");
            out.push_str("|---|---:|---:|---:|---:|---:|---:|---:|---:|\n");
            for row in rows {
                writeln!(out, "| {} |", cells(row).join(" | ")).unwrap();
            }
        }
    }
    Ok(out)
}

/// Writes `<dir>/<name>.<ext>` and returns its path.
pub fn emit_report(
    rows: &[ComparisonRow],
    format: ReportFormat,
    dir: &Path,
    name: &str,
) -> Result<PathBuf, ReportError> {
    let text = render_report(rows, format)?;
    let path = dir.join(format!("{name}.{}", format.extension()));
    let io = |source| ReportError::IoFailure {
        path: path.clone(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(&path, text).map_err(io)?;
    Ok(path)
}

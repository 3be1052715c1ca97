use std::collections::HashSet;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Diagnostic;

/// The SWF columns a job-to-VM conversion needs. Missing values are −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwfJob {
    pub job_id: i64,
    pub submit_time: i64,
    pub wait_time: i64,
    pub run_time: i64,
    pub allocated_procs: i64,
    pub requested_procs: i64,
    pub requested_runtime: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwfTrace {
    pub jobs: Vec<SwfJob>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Error)]
pub enum SwfError {
    #[error("trace contains no job records")]
    EmptyTrace { diagnostics: Vec<Diagnostic> },
    #[error("reading trace")]
    Io(#[from] std::io::Error),
}

// 0-based positions of SWF columns 1, 2, 3, 4, 5, 8, 9
const COLUMNS: [usize; 7] = [0, 1, 2, 3, 4, 7, 8];

fn parse_field(s: &str) -> Option<i64> {
    if let Ok(v) = s.parse::<i64>() {
        return Some(v);
    }
    // some archive logs write integral columns as decimals
    let v: f64 = s.parse().ok()?;
    (v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15).then_some(v as i64)
}

fn parse_line(line: &str) -> Result<SwfJob, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < COLUMNS[6] + 1 {
        return Err(format!(
            "expected at least {} fields, found {}",
            COLUMNS[6] + 1,
            fields.len()
        ));
    }
    let mut v = [0i64; 7];
    for (slot, &col) in v.iter_mut().zip(COLUMNS.iter()) {
        *slot = parse_field(fields[col])
            .ok_or_else(|| format!("field {} is not a number: {:?}", col + 1, fields[col]))?;
    }
    let [job_id, submit_time, wait_time, run_time, allocated_procs, requested_procs, requested_runtime] =
        v;
    for (name, t) in [
        ("submit time", submit_time),
        ("wait time", wait_time),
        ("run time", run_time),
        ("requested runtime", requested_runtime),
    ] {
        if t < -1 {
            return Err(format!("{name} {t} is negative"));
        }
    }
    Ok(SwfJob {
        job_id,
        submit_time,
        wait_time,
        run_time,
        allocated_procs,
        requested_procs,
        requested_runtime,
    })
}

/// Reads an SWF trace. Lines starting with `;` and blank lines are skipped
/// silently; malformed lines and repeated job ids are skipped with a
/// diagnostic.
pub fn parse_swf(reader: impl BufRead) -> Result<SwfTrace, SwfError> {
    let mut jobs = Vec::new();
    let mut diagnostics = Vec::new();
    let mut seen = HashSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        let lineno = n as u64 + 1;
        match parse_line(trimmed) {
            Ok(job) if !seen.insert(job.job_id) => diagnostics.push(Diagnostic {
                line: lineno,
                message: format!("duplicate job id {}", job.job_id),
            }),
            Ok(job) => jobs.push(job),
            Err(message) => diagnostics.push(Diagnostic {
                line: lineno,
                message,
            }),
        }
    }
    if jobs.is_empty() {
        return Err(SwfError::EmptyTrace { diagnostics });
    }
    Ok(SwfTrace { jobs, diagnostics })
}

//! Workload sources: SWF traces from the Parallel Workloads Archive and a
//! seeded synthetic generator. Both produce VMs drawn round-robin from the
//! four catalog types.

mod convert;
mod swf;
mod synth;

use std::fmt;

use serde::Serialize;

pub use convert::{jobs_to_vms, Conversion};
pub use swf::{parse_swf, SwfError, SwfJob, SwfTrace};
pub use synth::{synth_workload, SynthError, SynthParams};

/// A skipped input record and the reason it was skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// 1-based line number for trace lines, job id for conversion problems.
    pub line: u64,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

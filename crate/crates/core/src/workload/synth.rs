use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::convert::RoundRobin;
use crate::model::VmRequest;

/// Distribution parameters of synthetic jobs. Times are in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    /// Mean of the exponential inter-arrival time.
    pub mean_interarrival: f64,
    /// Durations are log-uniform on `[min_duration, max_duration]`.
    pub min_duration: u64,
    pub max_duration: u64,
    /// Processor (VM) count per job, uniform on `[min_procs, max_procs]`.
    pub min_procs: u32,
    pub max_procs: u32,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            mean_interarrival: 600.0,
            min_duration: 600,
            max_duration: 12 * 3600,
            min_procs: 1,
            max_procs: 8,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("at least one job is required")]
    NoJobs,
    #[error("invalid synthetic workload parameters: {0}")]
    InvalidParams(&'static str),
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.mean_interarrival.is_finite() && self.mean_interarrival > 0.0) {
            return Err(SynthError::InvalidParams(
                "mean_interarrival must be positive",
            ));
        }
        if self.min_duration == 0 || self.min_duration > self.max_duration {
            return Err(SynthError::InvalidParams(
                "durations need 0 < min_duration <= max_duration",
            ));
        }
        if self.min_procs == 0 || self.min_procs > self.max_procs {
            return Err(SynthError::InvalidParams(
                "processor counts need 0 < min_procs <= max_procs",
            ));
        }
        Ok(())
    }
}

/// Generates `n_jobs` jobs and expands them into VMs like a trace
/// conversion. The same seed and parameters always give the same VMs.
pub fn synth_workload(
    seed: u64,
    n_jobs: usize,
    params: &SynthParams,
) -> Result<Vec<VmRequest>, SynthError> {
    if n_jobs == 0 {
        return Err(SynthError::NoJobs);
    }
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arrivals = Exp::new(1.0 / params.mean_interarrival).expect("positive rate");
    let (lo, hi) = (
        (params.min_duration as f64).ln(),
        (params.max_duration as f64).ln(),
    );
    let mut types = RoundRobin::default();
    let mut vms = Vec::new();
    let mut clock = 0.0f64;
    for _ in 0..n_jobs {
        clock += arrivals.sample(&mut rng);
        let duration = if lo < hi {
            rng.random_range(lo..=hi).exp().round() as u64
        } else {
            params.min_duration
        };
        let duration = duration.clamp(params.min_duration, params.max_duration);
        let procs = rng.random_range(params.min_procs..=params.max_procs);
        let start = clock.floor() as u64;
        for _ in 0..procs {
            let id = vms.len() as u64 + 1;
            vms.push(types.next_vm(id, start, duration));
        }
    }
    Ok(vms)
}

use crate::catalog::{vm_type, VM_CATALOG};
use crate::model::{VmId, VmRequest, VmType};

use super::{Diagnostic, SwfJob};

#[derive(Debug, Clone, PartialEq)]
pub struct Conversion {
    pub vms: Vec<VmRequest>,
    /// Jobs skipped as unusable, keyed by job id.
    pub diagnostics: Vec<Diagnostic>,
}

/// Hands out catalog types in a fixed cycle across all VMs of a run.
#[derive(Debug, Default)]
pub(crate) struct RoundRobin(usize);

impl RoundRobin {
    pub fn next_vm(&mut self, id: u64, start_time: u64, duration: u64) -> VmRequest {
        let k = (self.0 % VM_CATALOG.len()) as u8 + 1;
        self.0 += 1;
        VmRequest {
            id: VmId(id),
            vm_type: VmType::Catalog(k),
            demand: vm_type(k).expect("catalog index in range"),
            start_time,
            duration,
        }
    }
}

/// Converts the first `limit` jobs to VMs, one VM per processor.
///
/// A VM starts at submit + wait and runs for the requested runtime, or the
/// actual run time when no request was recorded. The processor count is the
/// allocated count, falling back to the requested count. VM ids run from 1
/// in job order. Jobs without a positive duration or processor count are
/// skipped with a diagnostic. `limit` larger than the job list takes all jobs.
pub fn jobs_to_vms(jobs: &[SwfJob], limit: usize) -> Conversion {
    let mut types = RoundRobin::default();
    let mut vms = Vec::new();
    let mut diagnostics = Vec::new();
    let mut next_id = 1;
    for job in &jobs[..limit.min(jobs.len())] {
        let mut unusable = |why: &str| {
            diagnostics.push(Diagnostic {
                line: job.job_id.max(0) as u64,
                message: format!("job {} unusable: {why}", job.job_id),
            })
        };
        let duration = if job.requested_runtime > 0 {
            job.requested_runtime
        } else {
            job.run_time
        };
        let procs = if job.allocated_procs > 0 {
            job.allocated_procs
        } else {
            job.requested_procs
        };
        if duration <= 0 {
            unusable("no positive runtime");
            continue;
        }
        if procs <= 0 {
            unusable("no positive processor count");
            continue;
        }
        if job.submit_time < 0 {
            unusable("no submit time");
            continue;
        }
        let start = job.submit_time + job.wait_time.max(0);
        for _ in 0..procs {
            vms.push(types.next_vm(next_id, start as u64, duration as u64));
            next_id += 1;
        }
    }
    Conversion { vms, diagnostics }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(id: i64, submit: i64, wait: i64, run: i64, procs: i64, req_rt: i64) -> SwfJob {
        SwfJob {
            job_id: id,
            submit_time: submit,
            wait_time: wait,
            run_time: run,
            allocated_procs: procs,
            requested_procs: procs,
            requested_runtime: req_rt,
        }
    }

    fn types(vms: &[VmRequest]) -> Vec<VmType> {
        vms.iter().map(|v| v.vm_type).collect()
    }

    #[test]
    fn four_procs_cover_all_types() {
        let c = jobs_to_vms(&[job(1, 0, 10, 3600, 4, 7200)], 1);
        assert_eq!(types(&c.vms), [1, 2, 3, 4].map(VmType::Catalog).to_vec());
        for (i, vm) in c.vms.iter().enumerate() {
            assert_eq!(vm.id, VmId(i as u64 + 1));
            assert_eq!(vm.start_time, 10);
            assert_eq!(vm.duration, 7200);
            assert_eq!(vm.demand, VM_CATALOG[i]);
        }
    }

    #[test]
    fn counter_is_global() {
        let c = jobs_to_vms(&[job(1, 0, 0, 10, 2, -1), job(2, 5, 0, 10, 2, -1)], 2);
        assert_eq!(types(&c.vms), [1, 2, 3, 4].map(VmType::Catalog).to_vec());
        assert_eq!(c.vms[0].duration, 10);
    }

    #[test]
    fn unusable_jobs_are_skipped() {
        let mut no_procs = job(3, 0, 0, 10, -1, 10);
        no_procs.requested_procs = -1;
        let c = jobs_to_vms(
            &[job(1, 0, 0, -1, 1, -1), job(2, 0, 0, 0, 1, 0), no_procs],
            3,
        );
        assert!(c.vms.is_empty());
        assert_eq!(c.diagnostics.len(), 3);
        assert_eq!(c.diagnostics[0].line, 1);
    }

    #[test]
    fn fallbacks_and_missing_wait() {
        let mut j = job(1, 100, -1, 50, -1, -1);
        j.requested_procs = 2;
        let c = jobs_to_vms(&[j], 1);
        assert_eq!(c.vms.len(), 2);
        assert_eq!(c.vms[0].start_time, 100);
        assert_eq!(c.vms[0].duration, 50);
    }

    #[test]
    fn limit_takes_a_prefix() {
        let jobs: Vec<_> = (1..=5).map(|i| job(i, i * 10, 0, 10, 1, 10)).collect();
        assert_eq!(jobs_to_vms(&jobs, 3).vms.len(), 3);
        assert_eq!(jobs_to_vms(&jobs, 50).vms.len(), 5);
        assert!(jobs_to_vms(&jobs, 0).vms.is_empty());
    }
}

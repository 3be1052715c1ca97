//! Exhaustive search for the minimum total busy time on small instances.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{HostId, Scenario, Seconds, VmId};
use crate::timeline::{self, BusyProfile};

pub const MAX_VMS: usize = 10;
pub const MAX_HOSTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub best_assignment: BTreeMap<VmId, HostId>,
    pub optimal_busy_time: Seconds,
    /// Feasible complete assignments visited.
    pub explored: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{vms} VMs on {hosts} hosts exceeds the {MAX_VMS} VM / {MAX_HOSTS} host limit")]
    InstanceTooLarge { vms: usize, hosts: usize },
    #[error("no assignment of every VM to a host is feasible")]
    NoFeasibleAssignment,
}

struct Search<'a, F> {
    scenario: &'a Scenario,
    prune: bool,
    hosts: Vec<Vec<usize>>,
    assignment: Vec<usize>,
    visit: F,
    count: u64,
}

impl<F: FnMut(&[usize])> Search<'_, F> {
    fn descend(&mut self, vi: usize) {
        let vms = self.scenario.vms();
        if vi == vms.len() {
            self.count += 1;
            (self.visit)(&self.assignment);
            return;
        }
        let m = self.hosts.len();
        let limit = if self.prune {
            // a host is only opened after every lower-numbered host
            let used = self.hosts.iter().take_while(|h| !h.is_empty()).count();
            (used + 1).min(m)
        } else {
            m
        };
        for h in 0..limit {
            let spec = &self.scenario.hosts()[h];
            let fits =
                timeline::feasible_with(spec, self.hosts[h].iter().map(|&i| &vms[i]), &vms[vi]);
            if !fits {
                continue;
            }
            self.hosts[h].push(vi);
            self.assignment.push(h);
            self.descend(vi + 1);
            self.assignment.pop();
            self.hosts[h].pop();
        }
    }
}

fn check_size(scenario: &Scenario) -> Result<(), OracleError> {
    let (vms, hosts) = (scenario.vms().len(), scenario.hosts().len());
    if vms > MAX_VMS || hosts > MAX_HOSTS {
        return Err(OracleError::InstanceTooLarge { vms, hosts });
    }
    Ok(())
}

/// Calls `f` with every feasible assignment in lexicographic order. The
/// slice maps scenario VM position to host position. With `prune`, only
/// assignments whose hosts are opened in index order are visited, which
/// covers every assignment up to a relabelling of identical hosts. Returns
/// the number visited.
pub fn for_each_feasible_assignment(
    scenario: &Scenario,
    prune: bool,
    f: impl FnMut(&[usize]),
) -> Result<u64, OracleError> {
    check_size(scenario)?;
    let mut search = Search {
        scenario,
        prune,
        hosts: vec![Vec::new(); scenario.hosts().len()],
        assignment: Vec::with_capacity(scenario.vms().len()),
        visit: f,
        count: 0,
    };
    search.descend(0);
    Ok(search.count)
}

/// Total busy time of an assignment given as VM position → host position.
pub fn assignment_busy_time(scenario: &Scenario, assignment: &[usize]) -> Seconds {
    let mut per_host = vec![Vec::new(); scenario.hosts().len()];
    for (vi, &h) in assignment.iter().enumerate() {
        per_host[h].push(scenario.vms()[vi].interval());
    }
    per_host
        .into_iter()
        .map(|ivs| BusyProfile::from_intervals(ivs).span())
        .sum()
}

/// Minimum Σ busy time over all feasible assignments. Ties go to the
/// lexicographically smallest assignment (VMs in scenario order, hosts by
/// position).
pub fn brute_force_min_busy_time(scenario: &Scenario) -> Result<OracleResult, OracleError> {
    let mut best: Option<(Seconds, Vec<usize>)> = None;
    let explored = for_each_feasible_assignment(scenario, true, |a| {
        let t = assignment_busy_time(scenario, a);
        if best.as_ref().is_none_or(|(b, _)| t < *b) {
            best = Some((t, a.to_vec()));
        }
    })?;
    let (optimal_busy_time, assignment) = best.ok_or(OracleError::NoFeasibleAssignment)?;
    let best_assignment = assignment
        .iter()
        .enumerate()
        .map(|(vi, &h)| (scenario.vms()[vi].id, scenario.hosts()[h].id))
        .collect();
    Ok(OracleResult {
        best_assignment,
        optimal_busy_time,
        explored,
    })
}

//! Mutable per-run placement state shared by every scheduler.

use crate::model::{HostSpec, Load, Scenario, Schedule, Seconds, VmRequest};
use crate::timeline::{self, BusyProfile};

/// A host during a scheduler run: its VMs (as scenario positions), cached
/// busy profile and the plain sum of its VMs' demands.
#[derive(Debug, Clone, Default)]
pub(crate) struct HostState {
    pub vms: Vec<usize>,
    pub busy: BusyProfile,
    pub demand_sum: Load,
}

pub(crate) struct Placement<'s> {
    pub scenario: &'s Scenario,
    pub hosts: Vec<HostState>,
    schedule: Schedule,
}

impl<'s> Placement<'s> {
    pub fn new(scenario: &'s Scenario) -> Self {
        Self {
            scenario,
            hosts: vec![HostState::default(); scenario.hosts().len()],
            schedule: Schedule::new(),
        }
    }

    pub fn spec(&self, h: usize) -> &'s HostSpec {
        &self.scenario.hosts()[h]
    }

    pub fn vm(&self, i: usize) -> &'s VmRequest {
        &self.scenario.vms()[i]
    }

    pub fn host_vms(&self, h: usize) -> impl Iterator<Item = &'s VmRequest> + '_ {
        let vms = self.scenario.vms();
        self.hosts[h].vms.iter().map(move |&i| &vms[i])
    }

    /// Host positions worth evaluating, in id order. Hosts are identical, so
    /// every empty host after the first scores the same as the first and can
    /// never win a lowest-id tie-break.
    pub fn candidate_hosts(&self) -> impl Iterator<Item = usize> + '_ {
        let mut seen_empty = false;
        self.hosts.iter().enumerate().filter_map(move |(h, state)| {
            if state.vms.is_empty() {
                if seen_empty {
                    return None;
                }
                seen_empty = true;
            }
            Some(h)
        })
    }

    /// Whether VM `vi` fits host `h`, optionally with VM `without` removed.
    pub fn feasible(&self, h: usize, vi: usize, without: Option<usize>) -> bool {
        let vms = self.scenario.vms();
        let others = self.hosts[h]
            .vms
            .iter()
            .filter(|&&i| Some(i) != without)
            .map(|&i| &vms[i]);
        timeline::feasible_with(self.spec(h), others, &vms[vi])
    }

    /// Busy time of host `h` after adding VM `vi` (and removing `without`).
    pub fn busy_with(&self, h: usize, vi: usize, without: Option<usize>) -> Seconds {
        let state = &self.hosts[h];
        let candidate = self.vm(vi).interval();
        match without {
            None => state.busy.span_with(candidate),
            Some(out) => {
                let vms = self.scenario.vms();
                BusyProfile::from_intervals(
                    state
                        .vms
                        .iter()
                        .filter(|&&i| i != out)
                        .map(|&i| vms[i].interval())
                        .chain(std::iter::once(candidate)),
                )
                .span()
            }
        }
    }

    /// Demand sum of host `h` after adding `vi` (and removing `without`).
    pub fn demand_with(&self, h: usize, vi: usize, without: Option<usize>) -> Load {
        let mut sum = self.hosts[h].demand_sum;
        sum.add(&self.vm(vi).demand.load());
        if let Some(out) = without {
            sum.sub(&self.vm(out).demand.load());
        }
        sum
    }

    pub fn place(&mut self, vi: usize, h: usize) {
        let vm = &self.scenario.vms()[vi];
        let state = &mut self.hosts[h];
        state.vms.push(vi);
        state.busy.insert(vm.interval());
        state.demand_sum.add(&vm.demand.load());
        self.schedule.assign(vm.id, self.scenario.hosts()[h].id);
    }

    pub fn remove(&mut self, vi: usize, h: usize) {
        let vms = self.scenario.vms();
        let state = &mut self.hosts[h];
        state.vms.retain(|&i| i != vi);
        state.busy = BusyProfile::from_intervals(state.vms.iter().map(|&i| vms[i].interval()));
        let mut sum = Load::default();
        for &i in &state.vms {
            sum.add(&vms[i].demand.load());
        }
        state.demand_sum = sum;
        self.schedule.unassign(vms[vi].id);
    }

    pub fn mark_unplaced(&mut self, vi: usize) {
        self.schedule.mark_unplaced(self.vm(vi).id);
    }

    pub fn into_schedule(self) -> Schedule {
        self.schedule
    }
}

/// Offers VMs to hosts in `order`; each goes to the feasible host with the
/// lowest score, ties to the lowest host id.
pub(crate) fn greedy(
    scenario: &Scenario,
    order: &[usize],
    mut score: impl FnMut(&Placement<'_>, usize, usize) -> f64,
) -> Schedule {
    let mut p = Placement::new(scenario);
    for &vi in order {
        let mut best: Option<(f64, usize)> = None;
        for h in p.candidate_hosts() {
            if !p.feasible(h, vi, None) {
                continue;
            }
            let s = score(&p, h, vi);
            if best.is_none_or(|(b, _)| s < b) {
                best = Some((s, h));
            }
        }
        match best {
            Some((_, h)) => p.place(vi, h),
            None => p.mark_unplaced(vi),
        }
    }
    p.into_schedule()
}

//! Minimum resource-efficiency/time placement with same-type VM swapping.

use std::collections::VecDeque;

use super::metric::{efficiency_of, time_term};
use super::sort::{host_vm_rank, sort_vms};
use super::state::Placement;
use super::{can_swap, SchedulerConfig};
use crate::model::{Scenario, Schedule};

struct Choice {
    score: f64,
    host: usize,
    displaced: Option<usize>,
}

/// Places VMs in the configured order. For each VM every host is scored by
/// the squared weighted busy-time increase plus its resource efficiency
/// after placement; the VM goes to the lowest-scoring host.
///
/// With swapping enabled, a host holding a same-demand VM that starts
/// earlier, overlaps the new VM and is shorter is evaluated as if that VM
/// were replaced by the new one. The swap is committed only on the winning
/// host; the displaced VM re-enters the pending queue at its sorted position.
pub fn eminret_schedule(scenario: &Scenario, config: &SchedulerConfig) -> Schedule {
    let vms = scenario.vms();
    let order = sort_vms(vms, config.sort.key);
    let mut rank = vec![0; vms.len()];
    for (pos, &vi) in order.iter().enumerate() {
        rank[vi] = pos;
    }
    let mut pending: VecDeque<usize> = order.into();
    let mut p = Placement::new(scenario);

    while let Some(vi) = pending.pop_front() {
        let vm = &vms[vi];
        let mut best: Option<Choice> = None;
        for h in p.candidate_hosts() {
            // first swappable resident in host-VM order; ranks are unique
            let displaced = if config.swap_enabled {
                p.hosts[h]
                    .vms
                    .iter()
                    .copied()
                    .filter(|&i| can_swap(vm, &vms[i]))
                    .min_by_key(|&i| host_vm_rank(&vms[i], config.sort.host_vm_key))
            } else {
                None
            };
            if !p.feasible(h, vi, displaced) {
                continue;
            }
            let before = p.hosts[h].busy.span();
            // A swap can shrink the span; a shrink counts as no increase.
            let difftime = p.busy_with(h, vi, displaced).saturating_sub(before);
            let capacity = p.spec(h).capacity.capacity_load();
            let score = time_term(difftime, &config.weights)
                + efficiency_of(&p.demand_with(h, vi, displaced), &capacity, &config.weights);
            if best.as_ref().is_none_or(|b| score < b.score) {
                best = Some(Choice {
                    score,
                    host: h,
                    displaced,
                });
            }
        }
        match best {
            Some(choice) => {
                if let Some(out) = choice.displaced {
                    p.remove(out, choice.host);
                    let at = pending.partition_point(|&x| rank[x] < rank[out]);
                    pending.insert(at, out);
                }
                p.place(vi, choice.host);
            }
            None => p.mark_unplaced(vi),
        }
    }
    p.into_schedule()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{ml110_g5_linear, six_vm_example, HOUR};
    use crate::model::{HostId, MetricWeights, VmId};
    use crate::schedulers::SortOrder;

    fn config(k: u8, swap: bool) -> SchedulerConfig {
        SchedulerConfig::eminret(k, MetricWeights::default()).with_swap(swap)
    }

    #[test]
    fn swap_moves_the_short_vm_off_the_long_host() {
        let s = six_vm_example(3, ml110_g5_linear());
        let sched = eminret_schedule(&s, &config(1, true));
        sched.verify(&s).unwrap();
        assert_eq!(sched.total_busy_time(&s), 14 * HOUR);
        assert_eq!(sched.host_of(VmId(6)), sched.host_of(VmId(1)));
        assert_eq!(sched.host_of(VmId(1)), Some(HostId(0)));
        assert_ne!(sched.host_of(VmId(2)), Some(HostId(0)));
    }

    #[test]
    fn without_swap_the_short_vm_blocks() {
        let s = six_vm_example(3, ml110_g5_linear());
        let sched = eminret_schedule(&s, &config(1, false));
        sched.verify(&s).unwrap();
        assert_eq!(sched.host_of(VmId(2)), Some(HostId(0)));
        assert_eq!(sched.total_busy_time(&s), 21 * HOUR);
    }

    #[test]
    fn single_vm_single_host() {
        let s = six_vm_example(1, ml110_g5_linear());
        let one =
            crate::model::validate_scenario(s.hosts().to_vec(), vec![s.vms()[0].clone()]).unwrap();
        let cfg = SchedulerConfig {
            sort: SortOrder::start_time(),
            ..config(1, true)
        };
        let sched = eminret_schedule(&one, &cfg);
        assert_eq!(sched.host_of(VmId(1)), Some(HostId(0)));
        assert_eq!(sched.total_busy_time(&one), 10 * HOUR);
    }
}

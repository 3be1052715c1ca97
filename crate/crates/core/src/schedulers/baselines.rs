//! Baseline placement heuristics.

use super::metric::Resource;
use super::sort::sort_vms;
use super::state::{greedy, Placement};
use super::{NormDegree, SchedulerConfig};
use crate::energy::power_at;
use crate::model::{Load, Scenario, Schedule};

/// Each VM goes to the host whose busy time grows the least.
pub fn mindft_schedule(scenario: &Scenario, config: &SchedulerConfig) -> Schedule {
    let order = sort_vms(scenario.vms(), config.sort.key);
    greedy(scenario, &order, |p, h, vi| {
        (p.busy_with(h, vi, None) - p.hosts[h].busy.span()) as f64
    })
}

/// Each VM goes to the host with the best peak MIPS per peak watt.
///
/// On an identical fleet the ratio is constant, so this is first-fit in host
/// id order.
pub fn epobf_schedule(scenario: &Scenario, config: &SchedulerConfig) -> Schedule {
    let order = sort_vms(scenario.vms(), config.sort.key);
    greedy(scenario, &order, |p, h, _| {
        let spec = p.spec(h);
        -(spec.capacity.total_mips() / spec.power.max_watts)
    })
}

/// Power-aware best-fit decreasing: VMs by requested CPU, descending; each
/// goes to the host whose power draw rises least at the VM's start instant.
/// A host with nothing running at that instant is off and draws nothing.
pub fn pabfd_schedule(scenario: &Scenario) -> Schedule {
    let vms = scenario.vms();
    let mut order: Vec<usize> = (0..vms.len()).collect();
    order.sort_by(|&a, &b| {
        vms[b]
            .demand
            .total_mips()
            .total_cmp(&vms[a].demand.total_mips())
            .then(vms[a].id.cmp(&vms[b].id))
    });
    greedy(scenario, &order, power_increase)
}

fn power_increase(p: &Placement<'_>, h: usize, vi: usize) -> f64 {
    let spec = p.spec(h);
    let vm = p.vm(vi);
    let t = vm.start_time;
    let capacity = spec.capacity.total_mips();
    let (active, mips) = p
        .host_vms(h)
        .filter(|v| v.is_active_at(t))
        .fold((false, 0.0), |(_, m), v| (true, m + v.demand.total_mips()));
    let power =
        |mips: f64| power_at(&spec.power, (mips / capacity).clamp(0.0, 1.0)).expect("clamped");
    let before = if active { power(mips) } else { 0.0 };
    power(mips + vm.demand.total_mips()) - before
}

/// Axes the vector-packing heuristic works on: CPU, RAM, network, storage
/// and io when the host bounds it.
fn vbp_axes(scenario: &Scenario) -> Vec<Resource> {
    let io_bounded = scenario
        .hosts()
        .first()
        .is_some_and(|h| h.capacity.io > 0.0);
    [
        Resource::Cpu,
        Resource::Ram,
        Resource::NetBw,
        Resource::Storage,
    ]
    .into_iter()
    .chain(io_bounded.then_some(Resource::Io))
    .collect()
}

/// Norm-based greedy vector packing.
///
/// VMs are sorted by their average normalized demand, descending. Axis
/// weights are `exp(mean normalized demand on that axis)` over all VMs of
/// the run. Each VM goes to the host minimizing
/// Σ w_r · |residual_r − demand_r|^degree, where the residual is capacity
/// minus the plain demand sum of the host's VMs (not clamped, so an
/// over-committed axis keeps counting).
pub fn vbp_norm_schedule(scenario: &Scenario, degree: NormDegree) -> Schedule {
    let vms = scenario.vms();
    let Some(host) = scenario.hosts().first() else {
        let all: Vec<usize> = (0..vms.len()).collect();
        return greedy(scenario, &all, |_, _, _| 0.0);
    };
    let capacity = host.capacity.capacity_load();
    let axes = vbp_axes(scenario);
    let normalized = |load: &Load, r: Resource| load.0[r.axis()] / capacity.0[r.axis()];

    let demands: Vec<Vec<f64>> = vms
        .iter()
        .map(|v| {
            let load = v.demand.load();
            axes.iter().map(|r| normalized(&load, *r)).collect()
        })
        .collect();
    let weights: Vec<f64> = (0..axes.len())
        .map(|k| {
            let mean = if vms.is_empty() {
                0.0
            } else {
                demands.iter().map(|d| d[k]).sum::<f64>() / vms.len() as f64
            };
            mean.exp()
        })
        .collect();

    let mut order: Vec<usize> = (0..vms.len()).collect();
    let key = |i: usize| demands[i].iter().sum::<f64>() / axes.len() as f64;
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(vms[a].id.cmp(&vms[b].id)));

    let exponent = degree.exponent();
    greedy(scenario, &order, |p, h, vi| {
        let sum = p.hosts[h].demand_sum;
        axes.iter()
            .enumerate()
            .map(|(k, r)| {
                let residual = 1.0 - normalized(&sum, *r);
                weights[k] * (residual - demands[vi][k]).abs().powi(exponent)
            })
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_fleet, ml110_g5_linear, six_vm_example, vm_type, HOUR};
    use crate::model::{validate_scenario, HostId, VmId, VmRequest, VmType};
    use crate::schedulers::{SchedulerConfig, SortOrder};

    fn catalog_vm(id: u64, k: u8, start: u64, dur: u64) -> VmRequest {
        VmRequest {
            id: VmId(id),
            vm_type: VmType::Catalog(k),
            demand: vm_type(k).unwrap(),
            start_time: start,
            duration: dur,
        }
    }

    #[test]
    fn pabfd_orders_by_requested_cpu() {
        let vms: Vec<_> = [4u8, 3, 2, 1]
            .iter()
            .enumerate()
            .map(|(i, &k)| catalog_vm(i as u64, k, 0, 100))
            .collect();
        let s = validate_scenario(default_fleet(4), vms).unwrap();
        let sched = pabfd_schedule(&s);
        // VM1-type first: it lands on host 0 and everything else packs behind it
        assert_eq!(sched.host_of(VmId(3)), Some(HostId(0)));
        sched.verify(&s).unwrap();
    }

    #[test]
    fn pabfd_ties_go_to_first_host_and_empty_fleet_leaves_all_unplaced() {
        let s = validate_scenario(default_fleet(3), vec![catalog_vm(1, 3, 0, 10)]).unwrap();
        assert_eq!(pabfd_schedule(&s).host_of(VmId(1)), Some(HostId(0)));

        let empty = validate_scenario(vec![], vec![catalog_vm(1, 3, 0, 10)]).unwrap();
        let sched = pabfd_schedule(&empty);
        assert_eq!(sched.unplaced(), &[VmId(1)]);
        assert_eq!(
            vbp_norm_schedule(&empty, NormDegree::L2).unplaced(),
            &[VmId(1)]
        );
    }

    #[test]
    fn mindft_prefers_contained_interval() {
        let long = catalog_vm(1, 4, 0, 10);
        let inner = catalog_vm(2, 4, 2, 3);
        let s = validate_scenario(default_fleet(2), vec![long, inner]).unwrap();
        let sched = mindft_schedule(&s, &SchedulerConfig::mindft(SortOrder::start_time()));
        assert_eq!(sched.host_of(VmId(2)), Some(HostId(0)));
        assert_eq!(sched.total_busy_time(&s), 10);
        let empty = validate_scenario(default_fleet(2), vec![]).unwrap();
        assert_eq!(
            mindft_schedule(&empty, &SchedulerConfig::mindft(SortOrder::start_time())),
            Schedule::new()
        );
    }

    #[test]
    fn epobf_is_first_fit_on_identical_hosts() {
        // three VM1s overlapping: two per host by cores
        let vms: Vec<_> = (0..3).map(|i| catalog_vm(i, 1, 0, 10)).collect();
        let s = validate_scenario(default_fleet(3), vms).unwrap();
        let sched = epobf_schedule(&s, &SchedulerConfig::epobf(SortOrder::start_time()));
        assert_eq!(sched.host_of(VmId(0)), Some(HostId(0)));
        assert_eq!(sched.host_of(VmId(1)), Some(HostId(0)));
        assert_eq!(sched.host_of(VmId(2)), Some(HostId(1)));

        let lone = validate_scenario(vec![], vec![catalog_vm(9, 1, 0, 10)]).unwrap();
        let sched = epobf_schedule(&lone, &SchedulerConfig::epobf(SortOrder::start_time()));
        assert_eq!(sched.unplaced(), &[VmId(9)]);
    }

    #[test]
    fn vbp_prefers_the_fuller_host() {
        // host 0 half full on every axis; the small VM fits either host
        let mut half = catalog_vm(1, 1, 0, 10);
        half.vm_type = VmType::Custom;
        half.demand = crate::catalog::DEFAULT_HOST_CAPACITY;
        half.demand.cores = 2;
        half.demand.ram /= 2.0;
        half.demand.net_bw /= 2.0;
        half.demand.storage /= 2.0;
        let mut big = half.clone();
        big.id = VmId(0);
        let mut small = half.clone();
        small.id = VmId(2);
        small.demand.cores = 1;
        small.demand.ram /= 2.0;
        small.demand.net_bw /= 2.0;
        small.demand.storage /= 2.0;
        small.start_time = 100;
        let s = validate_scenario(default_fleet(2), vec![big, small]).unwrap();
        for degree in [NormDegree::L1, NormDegree::L2] {
            let sched = vbp_norm_schedule(&s, degree);
            assert_eq!(sched.host_of(VmId(0)), Some(HostId(0)));
            assert_eq!(sched.host_of(VmId(2)), Some(HostId(0)), "{degree:?}");
        }
    }

    #[test]
    fn vbp_packs_six_vm_example_onto_two_hosts() {
        let s = six_vm_example(3, ml110_g5_linear());
        for degree in [NormDegree::L1, NormDegree::L2] {
            let sched = vbp_norm_schedule(&s, degree);
            sched.verify(&s).unwrap();
            assert_eq!(sched.hosts_used(), 2);
            assert_eq!(sched.total_busy_time(&s), 20 * HOUR);
        }
    }
}

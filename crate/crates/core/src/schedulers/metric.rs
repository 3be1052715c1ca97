//! Resource utilization, resource efficiency and the combined time/efficiency
//! score used to rank hosts.

use serde::{Deserialize, Serialize};

use crate::model::{HostSpec, Load, MetricWeights, Seconds, VmRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    Cpu,
    Ram,
    NetBw,
    Io,
    Storage,
}

impl Resource {
    pub const ALL: [Resource; 5] = [
        Resource::Cpu,
        Resource::Ram,
        Resource::NetBw,
        Resource::Io,
        Resource::Storage,
    ];

    pub(crate) fn axis(self) -> usize {
        match self {
            Resource::Cpu => Load::MIPS,
            Resource::Ram => Load::RAM,
            Resource::NetBw => Load::NET,
            Resource::Io => Load::IO,
            Resource::Storage => Load::STORAGE,
        }
    }

    pub fn weight(self, w: &MetricWeights) -> f64 {
        match self {
            Resource::Cpu => w.cpu,
            Resource::Ram => w.ram,
            Resource::NetBw => w.net_bw,
            Resource::Io => w.io,
            Resource::Storage => w.storage,
        }
    }
}

/// Share of `r` claimed by every VM assigned to the host, regardless of
/// whether they overlap in time. Clamped to `[0, 1]`.
pub fn resource_utilization<'a>(
    host: &HostSpec,
    host_vms: impl IntoIterator<Item = &'a VmRequest>,
    r: Resource,
) -> f64 {
    let mut sum = Load::default();
    for vm in host_vms {
        sum.add(&vm.demand.load());
    }
    utilization_of(&sum, &host.capacity.capacity_load(), r)
}

pub(crate) fn utilization_of(sum: &Load, capacity: &Load, r: Resource) -> f64 {
    let cap = capacity.0[r.axis()];
    if cap.is_infinite() || cap <= 0.0 {
        return 0.0;
    }
    (sum.0[r.axis()] / cap).clamp(0.0, 1.0)
}

/// Σ_r ((1 − U_r) · w_r)²: weighted squared distance of the utilization
/// vector from full use.
pub fn resource_efficiency<'a>(
    host: &HostSpec,
    host_vms: impl IntoIterator<Item = &'a VmRequest>,
    weights: &MetricWeights,
) -> f64 {
    let mut sum = Load::default();
    for vm in host_vms {
        sum.add(&vm.demand.load());
    }
    efficiency_of(&sum, &host.capacity.capacity_load(), weights)
}

pub(crate) fn efficiency_of(sum: &Load, capacity: &Load, weights: &MetricWeights) -> f64 {
    Resource::ALL
        .iter()
        .map(|r| {
            let slack = (1.0 - utilization_of(sum, capacity, *r)) * r.weight(weights);
            slack * slack
        })
        .sum()
}

/// (difftime · w_time)² + resource efficiency. `host_vms` should already
/// include the VM being placed.
pub fn ret_metric<'a>(
    difftime: Seconds,
    host: &HostSpec,
    host_vms: impl IntoIterator<Item = &'a VmRequest>,
    weights: &MetricWeights,
) -> f64 {
    time_term(difftime, weights) + resource_efficiency(host, host_vms, weights)
}

pub(crate) fn time_term(difftime: Seconds, weights: &MetricWeights) -> f64 {
    let t = difftime as f64 * weights.time;
    t * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_host, vm_type, DEFAULT_HOST_CAPACITY};
    use crate::model::{HostId, VmId, VmType};

    fn catalog_vm(id: u64, k: u8) -> VmRequest {
        VmRequest {
            id: VmId(id),
            vm_type: VmType::Catalog(k),
            demand: vm_type(k).unwrap(),
            start_time: 0,
            duration: 100,
        }
    }

    fn cpu_ram_only() -> MetricWeights {
        MetricWeights {
            time: 0.0,
            cpu: 1.0,
            ram: 1.0,
            net_bw: 0.0,
            io: 0.0,
            storage: 0.0,
        }
    }

    #[test]
    fn utilization_examples() {
        let host = default_host(HostId(0));
        assert_eq!(
            resource_utilization(&host, [&catalog_vm(1, 2)], Resource::Ram),
            0.46875
        );
        assert_eq!(resource_utilization(&host, &[], Resource::Cpu), 0.0);
        let two = [catalog_vm(1, 3), catalog_vm(2, 3)];
        assert_eq!(resource_utilization(&host, &two, Resource::Ram), 0.375);
        // unbounded io never registers
        assert_eq!(resource_utilization(&host, &two, Resource::Io), 0.0);
    }

    #[test]
    fn utilization_is_clamped() {
        let host = default_host(HostId(0));
        let many: Vec<_> = (0..5).map(|i| catalog_vm(i, 2)).collect();
        assert_eq!(resource_utilization(&host, &many, Resource::Ram), 1.0);
    }

    #[test]
    fn efficiency_examples() {
        let host = default_host(HostId(0));
        let w = cpu_ram_only();
        assert_eq!(resource_efficiency(&host, &[], &w), 2.0);

        let mut full = catalog_vm(1, 1);
        full.vm_type = VmType::Custom;
        full.demand = DEFAULT_HOST_CAPACITY;
        let all = MetricWeights::default();
        assert_eq!(resource_efficiency(&host, [&full], &all), 0.0);

        let mut half = full.clone();
        half.demand.mips_per_core /= 2.0;
        half.demand.ram /= 2.0;
        assert_eq!(resource_efficiency(&host, [&half], &w), 0.5);
    }

    #[test]
    fn ret_examples() {
        let host = default_host(HostId(0));
        let mut full = catalog_vm(1, 1);
        full.demand = DEFAULT_HOST_CAPACITY;
        assert_eq!(ret_metric(0, &host, [&full], &cpu_ram_only()), 0.0);

        let time_only = MetricWeights {
            time: 1.0 / 3600.0,
            cpu: 0.0,
            ram: 0.0,
            net_bw: 0.0,
            io: 0.0,
            storage: 0.0,
        };
        assert!((ret_metric(7200, &host, &[], &time_only) - 4.0).abs() < 1e-12);
        assert_eq!(ret_metric(0, &host, &[], &cpu_ram_only()), 2.0);
    }
}

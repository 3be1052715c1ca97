//! Built-in VM types, the reference host and its measured power curve, and a
//! small hand-checkable placement example.

use crate::model::{
    validate_scenario, HostId, HostSpec, PowerModel, ResourceVector, Scenario, VmId, VmRequest,
    VmType,
};

const fn vm_row(cores: u32, mips_per_core: f64, ram: f64) -> ResourceVector {
    ResourceVector {
        cores,
        mips_per_core,
        ram,
        net_bw: 100.0,
        storage: 5.0,
        io: 0.0,
    }
}

/// The four VM types: high-CPU, high-memory, small and micro.
pub const VM_CATALOG: [ResourceVector; 4] = [
    vm_row(2, 2500.0, 871.0),
    vm_row(1, 2000.0, 3840.0),
    vm_row(1, 1000.0, 1536.0),
    vm_row(1, 500.0, 613.0),
];

/// Demand vector of catalog type `k` (1-based).
pub fn vm_type(k: u8) -> Option<ResourceVector> {
    (1..=VM_CATALOG.len() as u8)
        .contains(&k)
        .then(|| VM_CATALOG[usize::from(k) - 1])
}

/// Measured power of an HP ProLiant ML110 G5 at 0%, 10%, ..., 100% CPU.
pub const ML110_G5_POWER: [(f64, f64); 11] = [
    (0.0, 93.7),
    (0.1, 97.0),
    (0.2, 101.0),
    (0.3, 105.0),
    (0.4, 110.0),
    (0.5, 116.0),
    (0.6, 121.0),
    (0.7, 125.0),
    (0.8, 129.0),
    (0.9, 133.0),
    (1.0, 135.0),
];

pub fn ml110_g5_power() -> PowerModel {
    PowerModel::from_table(ML110_G5_POWER.to_vec()).expect("built-in table is valid")
}

/// Straight line between the ML110 G5 idle and peak readings.
pub fn ml110_g5_linear() -> PowerModel {
    PowerModel::linear(ML110_G5_POWER[0].1, ML110_G5_POWER[10].1)
}

/// 4 cores at 2660 MIPS, 8 GB RAM, 10 Gbit/s, 1 TB storage, unbounded io.
pub const DEFAULT_HOST_CAPACITY: ResourceVector = ResourceVector {
    cores: 4,
    mips_per_core: 2660.0,
    ram: 8192.0,
    net_bw: 10_000.0,
    storage: 1000.0,
    io: 0.0,
};

pub fn default_host(id: HostId) -> HostSpec {
    HostSpec {
        id,
        capacity: DEFAULT_HOST_CAPACITY,
        power: ml110_g5_power(),
    }
}

/// `n` default hosts with ids `0..n`.
pub fn default_fleet(n: usize) -> Vec<HostSpec> {
    fleet(n, DEFAULT_HOST_CAPACITY, ml110_g5_power())
}

pub fn fleet(n: usize, capacity: ResourceVector, power: PowerModel) -> Vec<HostSpec> {
    (0..n as u64)
        .map(|i| HostSpec {
            id: HostId(i),
            capacity,
            power: power.clone(),
        })
        .collect()
}

/// Normalized host of the six-VM example: every axis has capacity 10 units
/// so that demands of 0.1 steps stay integral.
pub const EXAMPLE_HOST_CAPACITY: ResourceVector = ResourceVector {
    cores: 10,
    mips_per_core: 100.0,
    ram: 10.0,
    net_bw: 10.0,
    storage: 10.0,
    io: 0.0,
};

pub const HOUR: u64 = 3600;

/// Six VMs where packing onto the fewest hosts costs 20 busy hours but
/// spreading over three hosts costs 14.
///
/// Columns: id, cpu, ram, net (tenths of capacity), start hour, duration hours.
const SIX_VM_ROWS: [(u64, u32, f64, f64, u64, u64); 6] = [
    (1, 5, 1.0, 2.0, 0, 10),
    (2, 5, 5.0, 2.0, 0, 2),
    (3, 2, 4.0, 2.0, 0, 2),
    (4, 2, 4.0, 2.0, 0, 2),
    (5, 1, 1.0, 1.0, 0, 2),
    (6, 5, 5.0, 2.0, 1, 9),
];

pub fn six_vm_example_vms() -> Vec<VmRequest> {
    SIX_VM_ROWS
        .iter()
        .map(|&(id, cpu, ram, net, start, dur)| VmRequest {
            id: VmId(id),
            vm_type: VmType::Custom,
            demand: ResourceVector {
                cores: cpu,
                mips_per_core: 100.0,
                ram,
                net_bw: net,
                storage: 0.0,
                io: 0.0,
            },
            start_time: start * HOUR,
            duration: dur * HOUR,
        })
        .collect()
}

pub fn six_vm_example(hosts: usize, power: PowerModel) -> Scenario {
    validate_scenario(
        fleet(hosts, EXAMPLE_HOST_CAPACITY, power),
        six_vm_example_vms(),
    )
    .expect("example scenario is valid")
}

//! Random instance generators and independent reference computations shared
//! by the integration tests and the acceptance suite.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vmplace_core::catalog::{
    fleet, ml110_g5_linear, ml110_g5_power, vm_type, DEFAULT_HOST_CAPACITY, ML110_G5_POWER,
};
use vmplace_core::{
    validate_scenario, HostSpec, ResourceVector, Scenario, Schedule, VmId, VmRequest, VmType,
};

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub min_vms: usize,
    pub max_vms: usize,
    pub min_hosts: usize,
    pub max_hosts: usize,
    /// Every demand axis at most a quarter of host capacity.
    pub quarter: bool,
    pub linear_power: bool,
    /// Start times and durations are multiples of this many seconds.
    pub tick: u64,
    /// Starts fall in `[0, slots)` ticks, durations in `[1, slots]` ticks.
    pub slots: u64,
}

impl Shape {
    pub const SMALL: Shape = Shape {
        min_vms: 1,
        max_vms: 8,
        min_hosts: 1,
        max_hosts: 4,
        quarter: false,
        linear_power: true,
        tick: 600,
        slots: 12,
    };
}

fn custom_demand(rng: &mut impl Rng, quarter: bool) -> ResourceVector {
    let cap = DEFAULT_HOST_CAPACITY;
    // a small palette of levels so equal demand vectors (swap partners) are common
    let mut level = || f64::from(rng.random_range(1..=4u8)) / 4.0;
    let share = if quarter { 0.25 } else { 1.0 };
    let mips_per_core = cap.mips_per_core * level();
    let ram = cap.ram * share * level();
    let net_bw = cap.net_bw * share * level();
    let storage = cap.storage * share * level();
    let cores = if quarter {
        1
    } else {
        rng.random_range(1..=cap.cores)
    };
    ResourceVector {
        cores,
        mips_per_core,
        ram,
        net_bw,
        storage,
        io: 0.0,
    }
}

pub fn random_vm(rng: &mut impl Rng, id: u64, shape: &Shape) -> VmRequest {
    let catalog_choices: &[u8] = if shape.quarter {
        &[3, 4]
    } else {
        &[1, 2, 3, 4]
    };
    let (vm_type_tag, demand) = if rng.random_bool(0.6) {
        let k = catalog_choices[rng.random_range(0..catalog_choices.len())];
        (VmType::Catalog(k), vm_type(k).unwrap())
    } else {
        (VmType::Custom, custom_demand(rng, shape.quarter))
    };
    VmRequest {
        id: VmId(id),
        vm_type: vm_type_tag,
        demand,
        start_time: rng.random_range(0..shape.slots) * shape.tick,
        duration: rng.random_range(1..=shape.slots) * shape.tick,
    }
}

pub fn random_scenario(seed: u64, shape: &Shape) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(shape.min_vms..=shape.max_vms);
    let m = rng.random_range(shape.min_hosts..=shape.max_hosts);
    let power = if shape.linear_power {
        ml110_g5_linear()
    } else {
        ml110_g5_power()
    };
    let vms = (0..n as u64)
        .map(|i| random_vm(&mut rng, i + 1, shape))
        .collect();
    validate_scenario(fleet(m, DEFAULT_HOST_CAPACITY, power), vms)
        .expect("generated scenario is valid")
}

/// Reference power curve: the ML110 G5 readings interpolated by hand.
pub fn reference_table_power(u: f64) -> f64 {
    let scaled = u * 10.0;
    let i = (scaled.floor() as usize).min(9);
    let (w0, w1) = (ML110_G5_POWER[i].1, ML110_G5_POWER[i + 1].1);
    w0 + (w1 - w0) * (scaled - i as f64)
}

pub fn reference_power(host: &HostSpec, u: f64) -> f64 {
    match host.power.table {
        Some(_) => reference_table_power(u),
        None => host.power.idle_watts + (host.power.max_watts - host.power.idle_watts) * u,
    }
}

/// Energy in KWh by summing power over every whole second the host is busy.
pub fn riemann_energy(host: &HostSpec, vms: &[&VmRequest]) -> f64 {
    let Some(begin) = vms.iter().map(|v| v.start_time).min() else {
        return 0.0;
    };
    let end = vms.iter().map(|v| v.finish_time()).max().unwrap();
    let capacity = f64::from(host.capacity.cores) * host.capacity.mips_per_core;
    let mut joules = 0.0;
    for t in begin..end {
        let active: Vec<_> = vms
            .iter()
            .filter(|v| v.start_time <= t && t < v.finish_time())
            .collect();
        if active.is_empty() {
            continue;
        }
        let mips: f64 = active
            .iter()
            .map(|v| f64::from(v.demand.cores) * v.demand.mips_per_core)
            .sum();
        joules += reference_power(host, (mips / capacity).min(1.0));
    }
    joules / 3.6e6
}

/// Busy time counted second by second.
pub fn grid_busy_time(vms: &[&VmRequest]) -> u64 {
    let Some(begin) = vms.iter().map(|v| v.start_time).min() else {
        return 0;
    };
    let end = vms.iter().map(|v| v.finish_time()).max().unwrap();
    (begin..end)
        .filter(|&t| vms.iter().any(|v| v.start_time <= t && t < v.finish_time()))
        .count() as u64
}

/// Whether every host's VMs fit its capacity at every second, checked by
/// brute force over start instants.
pub fn brute_force_feasible(scenario: &Scenario, schedule: &Schedule) -> bool {
    scenario.hosts().iter().all(|host| {
        let vms = schedule.vms_on(scenario, host.id);
        vms.iter().all(|probe| {
            let t = probe.start_time;
            let active: Vec<_> = vms
                .iter()
                .filter(|v| v.start_time <= t && t < v.finish_time())
                .collect();
            let sum = |f: &dyn Fn(&ResourceVector) -> f64| {
                active.iter().map(|v| f(&v.demand)).sum::<f64>()
            };
            let cap = &host.capacity;
            let tol = |x: f64| x * (1.0 + 1e-9);
            let cores: u32 = active.iter().map(|v| v.demand.cores).sum();
            cores <= cap.cores
                && sum(&|d| f64::from(d.cores) * d.mips_per_core)
                    <= tol(f64::from(cap.cores) * cap.mips_per_core)
                && sum(&|d| d.ram) <= tol(cap.ram)
                && sum(&|d| d.net_bw) <= tol(cap.net_bw)
                && sum(&|d| d.storage) <= tol(cap.storage)
                && (cap.io == 0.0 || sum(&|d| d.io) <= tol(cap.io))
        })
    })
}

//! Host power model and exact energy integration over a schedule.
//!
//! A host draws power only while busy (at least one VM active); between busy
//! intervals it is off. Utilization is piecewise constant between VM start
//! and end events, so energy is integrated segment by segment.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    HostId, HostSpec, PowerModel, Scenario, Schedule, ScheduleError, Seconds, VmRequest,
};
use crate::timeline;

const JOULES_PER_KWH: f64 = 3.6e6;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("utilization {0} outside [0, 1]")]
    UtilizationOutOfRange(f64),
    #[error("infeasible schedule")]
    InfeasibleSchedule(#[from] ScheduleError),
    #[error("failed to write energy breakdown")]
    Io(#[from] csv::Error),
}

/// CPU utilization of `host` at instant `t`, clamped to `[0, 1]`.
pub fn utilization_at<'a>(
    host: &HostSpec,
    host_vms: impl IntoIterator<Item = &'a VmRequest>,
    t: Seconds,
) -> f64 {
    let mips: f64 = host_vms
        .into_iter()
        .filter(|v| v.is_active_at(t))
        .map(|v| v.demand.total_mips())
        .sum();
    clamp_utilization(mips / host.capacity.total_mips())
}

fn clamp_utilization(u: f64) -> f64 {
    debug_assert!(u <= 1.0 + 1e-9, "utilization {u} above 1");
    u.clamp(0.0, 1.0)
}

/// Power in watts at utilization `u`.
pub fn power_at(model: &PowerModel, u: f64) -> Result<f64, EnergyError> {
    if !(0.0..=1.0).contains(&u) {
        return Err(EnergyError::UtilizationOutOfRange(u));
    }
    let Some(table) = &model.table else {
        return Ok(model.idle_watts + (model.max_watts - model.idle_watts) * u);
    };
    // Index of the first row at or above u; validation guarantees rows span [0, 1].
    let hi = table.partition_point(|(x, _)| *x < u);
    let (x1, w1) = table[hi];
    if x1 == u || hi == 0 {
        return Ok(w1);
    }
    let (x0, w0) = table[hi - 1];
    Ok(w0 + (w1 - w0) * (u - x0) / (x1 - x0))
}

/// Energy in KWh drawn by `host` while running `host_vms`.
pub fn host_energy<'a>(host: &HostSpec, host_vms: impl IntoIterator<Item = &'a VmRequest>) -> f64 {
    let capacity = host.capacity.total_mips();
    let mut events: Vec<(Seconds, i64, f64)> = Vec::new();
    for vm in host_vms {
        let mips = vm.demand.total_mips();
        events.push((vm.start_time, 1, mips));
        events.push((vm.finish_time(), -1, mips));
    }
    events.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut joules = 0.0;
    let mut active = 0i64;
    let mut mips = 0.0;
    let mut i = 0;
    while i < events.len() {
        let t = events[i].0;
        while i < events.len() && events[i].0 == t {
            let (_, delta, m) = events[i];
            active += delta;
            mips += delta as f64 * m;
            i += 1;
        }
        if active > 0 {
            let next = events[i].0;
            let u = clamp_utilization(mips / capacity);
            let watts = power_at(&host.power, u).expect("clamped utilization");
            joules += watts * (next - t) as f64;
        } else {
            // Exact reset once the host drains, so rounding cannot carry over.
            mips = 0.0;
        }
    }
    joules / JOULES_PER_KWH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostEnergy {
    pub host_id: HostId,
    pub busy_seconds: Seconds,
    pub kwh: f64,
}

/// Energy of a whole schedule, with its split into the busy-time (idle power)
/// term and the per-VM dynamic term.
///
/// The split is exact for linear power models; for table models the two
/// components are still reported but need not add up to `total_kwh`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub per_host: Vec<HostEnergy>,
    pub total_kwh: f64,
    pub total_busy_time: Seconds,
    /// Idle power × total busy seconds.
    pub idle_component: f64,
    /// Σ (max − idle) × u_i × duration_i over placed VMs.
    pub dynamic_component: f64,
}

impl EnergyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `host_id,busy_seconds,kwh` rows.
    pub fn write_per_host_csv<W: Write>(&self, out: W) -> Result<(), EnergyError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["host_id", "busy_seconds", "kwh"])?;
        for h in &self.per_host {
            w.write_record([
                h.host_id.0.to_string(),
                h.busy_seconds.to_string(),
                format!("{:.9}", h.kwh),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Per-VM dynamic energy in KWh on a linear model: (max − idle) × u × duration.
pub fn vm_dynamic_energy(host: &HostSpec, vm: &VmRequest) -> f64 {
    let u = vm.demand.total_mips() / host.capacity.total_mips();
    (host.power.max_watts - host.power.idle_watts) * u * vm.duration as f64 / JOULES_PER_KWH
}

pub fn schedule_energy(
    scenario: &Scenario,
    schedule: &Schedule,
) -> Result<EnergyReport, EnergyError> {
    schedule.verify(scenario)?;
    let mut per_host = Vec::with_capacity(schedule.hosts_used());
    let mut total = 0.0;
    let mut busy_total = 0;
    let mut idle = 0.0;
    let mut dynamic = 0.0;
    for host_id in schedule.per_host().keys() {
        let host = scenario.host(*host_id).expect("verified");
        let vms = schedule.vms_on(scenario, *host_id);
        let kwh = host_energy(host, vms.iter().copied());
        let busy = timeline::host_busy_time(vms.iter().copied());
        total += kwh;
        busy_total += busy;
        idle += host.power.idle_watts * busy as f64 / JOULES_PER_KWH;
        dynamic += vms.iter().map(|v| vm_dynamic_energy(host, v)).sum::<f64>();
        per_host.push(HostEnergy {
            host_id: *host_id,
            busy_seconds: busy,
            kwh,
        });
    }
    Ok(EnergyReport {
        per_host,
        total_kwh: total,
        total_busy_time: busy_total,
        idle_component: idle,
        dynamic_component: dynamic,
    })
}

//! Domain types shared by every other module.
//!
//! Time is measured in whole seconds. Demands and capacities are stored in
//! absolute units (cores, MIPS per core, MB, Mbit/s, GB, abstract io units);
//! fractions of capacity are always derived, never stored.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::catalog;
use crate::timeline::{self, Interval};

/// Whole seconds.
pub type Seconds = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VmId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HostId(pub u64);

impl fmt::Display for VmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vm{}", self.0)
    }
}

impl fmt::Display for HostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "host{}", self.0)
    }
}

/// A demand or capacity vector.
///
/// For capacities, `io == 0` means the io axis is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResourceVector {
    pub cores: u32,
    pub mips_per_core: f64,
    pub ram: f64,
    pub net_bw: f64,
    pub storage: f64,
    #[serde(default)]
    pub io: f64,
}

impl ResourceVector {
    pub fn total_mips(&self) -> f64 {
        f64::from(self.cores) * self.mips_per_core
    }

    fn is_valid(&self) -> bool {
        [
            self.mips_per_core,
            self.ram,
            self.net_bw,
            self.storage,
            self.io,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
    }

    /// Demand along every checked axis.
    pub(crate) fn load(&self) -> Load {
        Load([
            f64::from(self.cores),
            self.total_mips(),
            self.ram,
            self.net_bw,
            self.storage,
            self.io,
        ])
    }

    /// Capacity along every checked axis; an io capacity of zero is unbounded.
    pub(crate) fn capacity_load(&self) -> Load {
        let mut load = self.load();
        if self.io == 0.0 {
            load.0[Load::IO] = f64::INFINITY;
        }
        load
    }
}

/// Fixed-size accumulator over the capacity-checked axes:
/// cores, total MIPS, RAM, network, storage, io.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Load(pub [f64; Load::DIMS]);

impl Load {
    pub const DIMS: usize = 6;
    pub const MIPS: usize = 1;
    pub const RAM: usize = 2;
    pub const NET: usize = 3;
    pub const STORAGE: usize = 4;
    pub const IO: usize = 5;

    pub fn add(&mut self, other: &Load) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
    }

    pub fn sub(&mut self, other: &Load) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a -= b;
        }
    }

    /// `self <= capacity` on every axis, with a relative slack of 1e-9 for
    /// fractional demands.
    pub fn fits(&self, capacity: &Load) -> bool {
        self.0
            .iter()
            .zip(capacity.0.iter())
            .all(|(d, c)| *d <= *c + 1e-9 * c.abs().max(1.0))
    }
}

/// Catalog index (1..=4) or a custom demand vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VmType {
    Catalog(u8),
    Custom,
}

impl Serialize for VmType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            VmType::Catalog(k) => serializer.serialize_u8(*k),
            VmType::Custom => serializer.serialize_str("custom"),
        }
    }
}

impl<'de> Deserialize<'de> for VmType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(u8),
            Name(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Index(k) => Ok(VmType::Catalog(k)),
            Raw::Name(s) if s == "custom" => Ok(VmType::Custom),
            Raw::Name(s) => Err(serde::de::Error::custom(format!(
                "unknown vm_type {s:?}, expected 1..=4 or \"custom\""
            ))),
        }
    }
}

/// One VM = one fixed interval job `[start_time, start_time + duration)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmRequest {
    pub id: VmId,
    pub vm_type: VmType,
    pub demand: ResourceVector,
    pub start_time: Seconds,
    pub duration: Seconds,
}

impl VmRequest {
    pub fn finish_time(&self) -> Seconds {
        self.start_time + self.duration
    }

    pub fn interval(&self) -> Interval {
        Interval {
            start: self.start_time,
            end: self.finish_time(),
        }
    }

    /// Active at `t` under half-open interval semantics.
    pub fn is_active_at(&self, t: Seconds) -> bool {
        self.start_time <= t && t < self.finish_time()
    }
}

/// Host power as a function of CPU utilization.
///
/// Without a table the model is linear between `idle_watts` and `max_watts`;
/// with one, power is interpolated piecewise-linearly between table rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    pub idle_watts: f64,
    pub max_watts: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<(f64, f64)>>,
}

impl PowerModel {
    pub fn linear(idle_watts: f64, max_watts: f64) -> Self {
        Self {
            idle_watts,
            max_watts,
            table: None,
        }
    }

    /// Builds a table model; idle and max watts are taken from the end rows.
    pub fn from_table(points: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        let (idle, max) = match (points.first(), points.last()) {
            (Some(first), Some(last)) => (first.1, last.1),
            _ => return Err(ModelError::InvalidPowerTable("empty table".into())),
        };
        let model = Self {
            idle_watts: idle,
            max_watts: max,
            table: Some(points),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn is_linear(&self) -> bool {
        self.table.is_none()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.idle_watts.is_finite() && self.max_watts.is_finite())
            || self.idle_watts <= 0.0
            || self.idle_watts > self.max_watts
        {
            return Err(ModelError::InvalidPowerModel {
                idle: self.idle_watts,
                max: self.max_watts,
            });
        }
        let Some(table) = &self.table else {
            return Ok(());
        };
        let bad = |msg: &str| Err(ModelError::InvalidPowerTable(msg.to_string()));
        if table.len() < 2 {
            return bad("needs at least two rows");
        }
        if table[0].0 != 0.0 || table[table.len() - 1].0 != 1.0 {
            return bad("utilization must run from 0 to 1");
        }
        if table.iter().any(|(u, w)| !u.is_finite() || !w.is_finite()) {
            return bad("non-finite entry");
        }
        for pair in table.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return bad("utilizations must be strictly increasing");
            }
            if pair[1].1 < pair[0].1 {
                return bad("watts must be non-decreasing");
            }
        }
        if table[0].1 != self.idle_watts || table[table.len() - 1].1 != self.max_watts {
            return bad("idle/max watts disagree with the table end rows");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostSpec {
    pub id: HostId,
    pub capacity: ResourceVector,
    pub power: PowerModel,
}

/// Weights of the placement metric: one for the busy-time increase (per
/// second) and one per resource axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricWeights {
    pub time: f64,
    pub cpu: f64,
    pub ram: f64,
    pub net_bw: f64,
    pub io: f64,
    pub storage: f64,
}

impl Default for MetricWeights {
    fn default() -> Self {
        Self {
            time: 1.0,
            cpu: 940.0,
            ram: 24414.0,
            net_bw: 1.0,
            io: 0.0,
            storage: 0.0001,
        }
    }
}

impl MetricWeights {
    pub fn with_time(self, time: f64) -> Self {
        Self { time, ..self }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.time,
            self.cpu,
            self.ram,
            self.net_bw,
            self.io,
            self.storage,
        ];
        if all.iter().all(|w| w.is_finite() && *w >= 0.0) {
            Ok(())
        } else {
            Err(ModelError::InvalidWeights)
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("fleet is not homogeneous: {0} differs from {1}")]
    HeterogeneousFleet(HostId, HostId),
    #[error("{vm} can never fit an empty host: {reason}")]
    InfeasibleVm { vm: VmId, reason: String },
    #[error("invalid power table: {0}")]
    InvalidPowerTable(String),
    #[error("invalid power model: idle {idle} W, max {max} W")]
    InvalidPowerModel { idle: f64, max: f64 },
    #[error("invalid host {host}: {reason}")]
    InvalidHost { host: HostId, reason: String },
    #[error("invalid {vm}: {reason}")]
    InvalidVm { vm: VmId, reason: String },
    #[error("duplicate host id {0}")]
    DuplicateHost(HostId),
    #[error("duplicate vm id {0}")]
    DuplicateVm(VmId),
    #[error("metric weights must be finite and non-negative")]
    InvalidWeights,
}

/// A validated set of hosts and VMs. Hosts are kept sorted by id, VMs in
/// input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    hosts: Vec<HostSpec>,
    vms: Vec<VmRequest>,
    vm_index: BTreeMap<VmId, usize>,
}

impl Scenario {
    pub fn hosts(&self) -> &[HostSpec] {
        &self.hosts
    }

    pub fn vms(&self) -> &[VmRequest] {
        &self.vms
    }

    pub fn vm(&self, id: VmId) -> Option<&VmRequest> {
        self.vm_index.get(&id).map(|&i| &self.vms[i])
    }

    pub fn vm_position(&self, id: VmId) -> Option<usize> {
        self.vm_index.get(&id).copied()
    }

    pub fn host(&self, id: HostId) -> Option<&HostSpec> {
        self.hosts
            .binary_search_by_key(&id, |h| h.id)
            .ok()
            .map(|i| &self.hosts[i])
    }

    /// Replaces the fleet, re-running validation.
    pub fn with_hosts(self, hosts: Vec<HostSpec>) -> Result<Self, ModelError> {
        validate_scenario(hosts, self.vms)
    }
}

/// Checks every type invariant, fleet homogeneity and that each VM fits an
/// empty host on its own.
pub fn validate_scenario(
    mut hosts: Vec<HostSpec>,
    vms: Vec<VmRequest>,
) -> Result<Scenario, ModelError> {
    hosts.sort_by_key(|h| h.id);
    for pair in hosts.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(ModelError::DuplicateHost(pair[0].id));
        }
    }
    for host in &hosts {
        let invalid = |reason: &str| ModelError::InvalidHost {
            host: host.id,
            reason: reason.to_string(),
        };
        if !host.capacity.is_valid() {
            return Err(invalid("capacity fields must be finite and non-negative"));
        }
        if host.capacity.cores < 1 {
            return Err(invalid("needs at least one core"));
        }
        if host.capacity.mips_per_core <= 0.0 {
            return Err(invalid("mips_per_core must be positive"));
        }
        host.power.validate()?;
    }
    if let Some(first) = hosts.first() {
        if let Some(other) = hosts
            .iter()
            .find(|h| h.capacity != first.capacity || h.power != first.power)
        {
            return Err(ModelError::HeterogeneousFleet(other.id, first.id));
        }
    }

    let mut seen = HashSet::with_capacity(vms.len());
    for vm in &vms {
        if !seen.insert(vm.id) {
            return Err(ModelError::DuplicateVm(vm.id));
        }
        let invalid = |reason: String| ModelError::InvalidVm { vm: vm.id, reason };
        if vm.duration == 0 {
            return Err(invalid("duration must be positive".into()));
        }
        if vm.start_time.checked_add(vm.duration).is_none() {
            return Err(invalid("finish time overflows".into()));
        }
        if !vm.demand.is_valid() {
            return Err(invalid(
                "demand fields must be finite and non-negative".into(),
            ));
        }
        if let VmType::Catalog(k) = vm.vm_type {
            match catalog::vm_type(k) {
                Some(row) if row == vm.demand => {}
                Some(_) => return Err(invalid(format!("demand differs from catalog type {k}"))),
                None => return Err(invalid(format!("no catalog type {k}"))),
            }
        }
        if let Some(host) = hosts.first() {
            let cap = &host.capacity;
            let reason = if vm.demand.cores > cap.cores {
                Some(format!("{} cores > {}", vm.demand.cores, cap.cores))
            } else if vm.demand.mips_per_core > cap.mips_per_core {
                Some(format!(
                    "{} MIPS per core > {}",
                    vm.demand.mips_per_core, cap.mips_per_core
                ))
            } else if !vm.demand.load().fits(&cap.capacity_load()) {
                Some("demand exceeds capacity".to_string())
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(ModelError::InfeasibleVm { vm: vm.id, reason });
            }
        }
    }

    let vm_index = vms.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
    Ok(Scenario {
        hosts,
        vms,
        vm_index,
    })
}

/// VM→host mapping plus the reverse per-host lists and the VMs no host
/// could take.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    assignments: BTreeMap<VmId, HostId>,
    per_host: BTreeMap<HostId, Vec<VmId>>,
    unplaced: Vec<VmId>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("{0} is not part of the scenario")]
    UnknownVm(VmId),
    #[error("{0} is not part of the scenario")]
    UnknownHost(HostId),
    #[error("assignment table and per-host lists disagree on {0}")]
    Inconsistent(VmId),
    #[error("{0} exceeds capacity at some instant")]
    OverCapacity(HostId),
    #[error("{placed} placed + {unplaced} unplaced != {expected} vms")]
    CountMismatch {
        placed: usize,
        unplaced: usize,
        expected: usize,
    },
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, vm: VmId, host: HostId) {
        if let Some(prev) = self.assignments.insert(vm, host) {
            self.detach(vm, prev);
        }
        self.per_host.entry(host).or_default().push(vm);
    }

    /// Removes `vm` from its host, returning the host it was on.
    pub fn unassign(&mut self, vm: VmId) -> Option<HostId> {
        let host = self.assignments.remove(&vm)?;
        self.detach(vm, host);
        Some(host)
    }

    fn detach(&mut self, vm: VmId, host: HostId) {
        if let Some(list) = self.per_host.get_mut(&host) {
            list.retain(|v| *v != vm);
            if list.is_empty() {
                self.per_host.remove(&host);
            }
        }
    }

    pub fn mark_unplaced(&mut self, vm: VmId) {
        self.unplaced.push(vm);
    }

    pub fn assignments(&self) -> &BTreeMap<VmId, HostId> {
        &self.assignments
    }

    /// Only hosts with at least one VM appear.
    pub fn per_host(&self) -> &BTreeMap<HostId, Vec<VmId>> {
        &self.per_host
    }

    pub fn unplaced(&self) -> &[VmId] {
        &self.unplaced
    }

    pub fn host_of(&self, vm: VmId) -> Option<HostId> {
        self.assignments.get(&vm).copied()
    }

    pub fn hosts_used(&self) -> usize {
        self.per_host.len()
    }

    pub fn placed_count(&self) -> usize {
        self.assignments.len()
    }

    /// VM requests on `host`, resolved against the scenario.
    pub fn vms_on<'s>(&self, scenario: &'s Scenario, host: HostId) -> Vec<&'s VmRequest> {
        self.per_host
            .get(&host)
            .map(|ids| ids.iter().filter_map(|id| scenario.vm(*id)).collect())
            .unwrap_or_default()
    }

    /// Sum of host busy times.
    pub fn total_busy_time(&self, scenario: &Scenario) -> Seconds {
        self.per_host
            .keys()
            .map(|h| timeline::host_busy_time(self.vms_on(scenario, *h)))
            .sum()
    }

    /// Checks id resolution, consistency of both views, VM conservation and
    /// capacity at every instant on every host.
    pub fn verify(&self, scenario: &Scenario) -> Result<(), ScheduleError> {
        let mut listed = 0;
        for (host_id, vms) in &self.per_host {
            let host = scenario
                .host(*host_id)
                .ok_or(ScheduleError::UnknownHost(*host_id))?;
            let mut requests = Vec::with_capacity(vms.len());
            for vm in vms {
                let req = scenario.vm(*vm).ok_or(ScheduleError::UnknownVm(*vm))?;
                if self.assignments.get(vm) != Some(host_id) {
                    return Err(ScheduleError::Inconsistent(*vm));
                }
                requests.push(req);
            }
            listed += vms.len();
            if !timeline::within_capacity(host, requests) {
                return Err(ScheduleError::OverCapacity(*host_id));
            }
        }
        if listed != self.assignments.len() {
            let stray = self
                .assignments
                .iter()
                .find(|(vm, host)| {
                    !self
                        .per_host
                        .get(host)
                        .is_some_and(|list| list.contains(vm))
                })
                .map(|(vm, _)| *vm)
                .unwrap_or(VmId(0));
            return Err(ScheduleError::Inconsistent(stray));
        }
        for vm in &self.unplaced {
            if scenario.vm(*vm).is_none() {
                return Err(ScheduleError::UnknownVm(*vm));
            }
            if self.assignments.contains_key(vm) {
                return Err(ScheduleError::Inconsistent(*vm));
            }
        }
        let distinct_unplaced: HashSet<_> = self.unplaced.iter().collect();
        if self.assignments.len() + distinct_unplaced.len() != scenario.vms().len()
            || distinct_unplaced.len() != self.unplaced.len()
        {
            return Err(ScheduleError::CountMismatch {
                placed: self.assignments.len(),
                unplaced: self.unplaced.len(),
                expected: scenario.vms().len(),
            });
        }
        Ok(())
    }
}

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::model::VmRequest;

/// Order in which pending VMs are offered to the hosts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VmOrder {
    EarliestStart,
    EarliestFinish,
    LongestDuration,
    LatestFinish,
}

/// Order in which a host's VMs are scanned for a swap partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HostVmOrder {
    ByStart,
    ByFinish,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SortOrder {
    pub key: VmOrder,
    pub host_vm_key: HostVmOrder,
}

impl SortOrder {
    /// Configuration `k` (1..=8) of the EMinRET family: VM order varies
    /// slowest, host order alternates start/finish.
    pub fn eminret(k: u8) -> Option<Self> {
        let key = match k {
            1 | 2 => VmOrder::EarliestStart,
            3 | 4 => VmOrder::EarliestFinish,
            5 | 6 => VmOrder::LongestDuration,
            7 | 8 => VmOrder::LatestFinish,
            _ => return None,
        };
        let host_vm_key = if k % 2 == 1 {
            HostVmOrder::ByStart
        } else {
            HostVmOrder::ByFinish
        };
        Some(Self { key, host_vm_key })
    }

    pub fn start_time() -> Self {
        Self {
            key: VmOrder::EarliestStart,
            host_vm_key: HostVmOrder::ByStart,
        }
    }

    pub fn finish_time() -> Self {
        Self {
            key: VmOrder::EarliestFinish,
            host_vm_key: HostVmOrder::ByFinish,
        }
    }
}

/// Positions of `vms` in processing order. Ties on the key break by VM id.
pub fn sort_vms(vms: &[VmRequest], key: VmOrder) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vms.len()).collect();
    match key {
        VmOrder::EarliestStart => order.sort_by_key(|&i| (vms[i].start_time, vms[i].id)),
        VmOrder::EarliestFinish => order.sort_by_key(|&i| (vms[i].finish_time(), vms[i].id)),
        VmOrder::LongestDuration => order.sort_by_key(|&i| (Reverse(vms[i].duration), vms[i].id)),
        VmOrder::LatestFinish => order.sort_by_key(|&i| (Reverse(vms[i].finish_time()), vms[i].id)),
    }
    order
}

pub(crate) fn host_vm_rank(vm: &VmRequest, key: HostVmOrder) -> (u64, u64) {
    match key {
        HostVmOrder::ByStart => (vm.start_time, vm.id.0),
        HostVmOrder::ByFinish => (vm.finish_time(), vm.id.0),
    }
}

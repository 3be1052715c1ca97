//! Placement algorithms and their configuration.
//!
//! Every scheduler processes the full VM list up front, never migrates a
//! placed VM (apart from EMinRET's swap step, which happens before the swapped
//! VM's placement is final) and reports VMs that fit no host as unplaced.
//! All ties break by lowest host id, then by VM id.

mod baselines;
mod eminret;
pub mod metric;
mod sort;
mod state;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MetricWeights, Scenario, Schedule, VmRequest};
use crate::timeline;

pub use baselines::{epobf_schedule, mindft_schedule, pabfd_schedule, vbp_norm_schedule};
pub use eminret::eminret_schedule;
pub use metric::{resource_efficiency, resource_utilization, ret_metric, Resource};
pub use sort::{sort_vms, HostVmOrder, SortOrder, VmOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    EMinRet,
    MinDft,
    Epobf,
    Pabfd,
    VbpNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormDegree {
    L1,
    L2,
}

impl NormDegree {
    pub fn exponent(self) -> i32 {
        match self {
            NormDegree::L1 => 1,
            NormDegree::L2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    pub algorithm: Algorithm,
    pub sort: SortOrder,
    pub weights: MetricWeights,
    /// Only meaningful for [`Algorithm::VbpNorm`].
    pub norm_degree: Option<NormDegree>,
    /// Only meaningful for [`Algorithm::EMinRet`].
    pub swap_enabled: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown algorithm label {0:?}")]
    UnknownLabel(String),
}

/// Labels of the standard configurations, in report order.
pub const STANDARD_LABELS: [&str; 15] = [
    "pabfd",
    "vbp-norm-l1",
    "vbp-norm-l2",
    "epobf-st",
    "epobf-ft",
    "mindft-st",
    "mindft-ft",
    "eminret-1",
    "eminret-2",
    "eminret-3",
    "eminret-4",
    "eminret-5",
    "eminret-6",
    "eminret-7",
    "eminret-8",
];

impl SchedulerConfig {
    pub fn eminret(k: u8, weights: MetricWeights) -> Self {
        Self {
            algorithm: Algorithm::EMinRet,
            sort: SortOrder::eminret(k).expect("configuration 1..=8"),
            weights,
            norm_degree: None,
            swap_enabled: true,
        }
    }

    pub fn mindft(sort: SortOrder) -> Self {
        Self {
            algorithm: Algorithm::MinDft,
            sort,
            weights: MetricWeights::default(),
            norm_degree: None,
            swap_enabled: false,
        }
    }

    pub fn epobf(sort: SortOrder) -> Self {
        Self {
            algorithm: Algorithm::Epobf,
            ..Self::mindft(sort)
        }
    }

    pub fn pabfd() -> Self {
        Self {
            algorithm: Algorithm::Pabfd,
            ..Self::mindft(SortOrder::start_time())
        }
    }

    pub fn vbp_norm(degree: NormDegree) -> Self {
        Self {
            algorithm: Algorithm::VbpNorm,
            norm_degree: Some(degree),
            ..Self::mindft(SortOrder::start_time())
        }
    }

    pub fn with_swap(self, swap_enabled: bool) -> Self {
        Self {
            swap_enabled,
            ..self
        }
    }

    pub fn with_weights(self, weights: MetricWeights) -> Self {
        Self { weights, ..self }
    }

    /// Parses one of [`STANDARD_LABELS`], or `eminret-k-noswap` for EMinRET
    /// without the swap step.
    pub fn from_label(label: &str, weights: MetricWeights) -> Result<Self, ConfigError> {
        let unknown = || ConfigError::UnknownLabel(label.to_string());
        let config = match label {
            "pabfd" => Self::pabfd(),
            "vbp-norm-l1" => Self::vbp_norm(NormDegree::L1),
            "vbp-norm-l2" => Self::vbp_norm(NormDegree::L2),
            "epobf-st" => Self::epobf(SortOrder::start_time()),
            "epobf-ft" => Self::epobf(SortOrder::finish_time()),
            "mindft-st" => Self::mindft(SortOrder::start_time()),
            "mindft-ft" => Self::mindft(SortOrder::finish_time()),
            _ => {
                let rest = label.strip_prefix("eminret-").ok_or_else(unknown)?;
                let (k, swap) = match rest.strip_suffix("-noswap") {
                    Some(k) => (k, false),
                    None => (rest, true),
                };
                let k: u8 = k.parse().map_err(|_| unknown())?;
                if !(1..=8).contains(&k) {
                    return Err(unknown());
                }
                Self::eminret(k, weights).with_swap(swap)
            }
        };
        Ok(config.with_weights(weights))
    }

    /// Inverse of [`SchedulerConfig::from_label`] for the standard
    /// configurations; other combinations get a descriptive label.
    pub fn label(&self) -> String {
        let suffix = |s: &SortOrder| match s.key {
            VmOrder::EarliestStart => "st",
            VmOrder::EarliestFinish => "ft",
            VmOrder::LongestDuration => "ld",
            VmOrder::LatestFinish => "lf",
        };
        match self.algorithm {
            Algorithm::Pabfd => "pabfd".into(),
            Algorithm::VbpNorm => match self.norm_degree {
                Some(NormDegree::L1) => "vbp-norm-l1".into(),
                _ => "vbp-norm-l2".into(),
            },
            Algorithm::Epobf => format!("epobf-{}", suffix(&self.sort)),
            Algorithm::MinDft => format!("mindft-{}", suffix(&self.sort)),
            Algorithm::EMinRet => {
                let k = (1..=8)
                    .find(|k| SortOrder::eminret(*k) == Some(self.sort))
                    .expect("every sort order is an eminret configuration");
                if self.swap_enabled {
                    format!("eminret-{k}")
                } else {
                    format!("eminret-{k}-noswap")
                }
            }
        }
    }

    /// Whether a time-weight sweep applies to this configuration.
    pub fn uses_time_weight(&self) -> bool {
        matches!(self.algorithm, Algorithm::EMinRet | Algorithm::MinDft)
    }
}

impl FromStr for SchedulerConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_label(s, MetricWeights::default())
    }
}

impl fmt::Display for SchedulerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Whether `new_vm` may take `allocated_vm`'s place: identical demand
/// vectors, `allocated_vm` starts first and is overlapped in the strict
/// staggered sense, and `new_vm` runs longer.
pub fn can_swap(new_vm: &VmRequest, allocated_vm: &VmRequest) -> bool {
    new_vm.demand == allocated_vm.demand
        && timeline::overlaps(allocated_vm, new_vm)
        && new_vm.duration > allocated_vm.duration
}

/// Runs the algorithm named by `config`.
pub fn schedule(scenario: &Scenario, config: &SchedulerConfig) -> Schedule {
    match config.algorithm {
        Algorithm::EMinRet => eminret_schedule(scenario, config),
        Algorithm::MinDft => mindft_schedule(scenario, config),
        Algorithm::Epobf => epobf_schedule(scenario, config),
        Algorithm::Pabfd => pabfd_schedule(scenario),
        Algorithm::VbpNorm => {
            vbp_norm_schedule(scenario, config.norm_degree.unwrap_or(NormDegree::L2))
        }
    }
}

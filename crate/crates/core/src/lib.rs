//! Energy-aware placement of fixed-interval, non-preemptive virtual machines
//! onto a homogeneous fleet.
//!
//! On identical hosts with a linear power curve, a schedule's energy is the
//! idle power times the total host busy time plus a per-VM term that does
//! not depend on the mapping. Minimizing energy therefore means minimizing
//! the sum of host busy times. The [`schedulers`] module implements EMinRET,
//! which ranks hosts by busy-time increase combined with resource efficiency
//! and swaps overlapping same-type VMs, alongside the PABFD, VBP-Norm, EPOBF
//! and MinDFT baselines.
//!
//! Supporting modules:
//! - [`model`]: VM, host, power-model and schedule types with validation.
//! - [`timeline`]: interval unions, busy time and capacity checks over time.
//! - [`energy`]: power curves and exact energy integration.
//! - [`workload`]: SWF trace parsing, job→VM conversion, synthetic workloads.
//! - [`oracle`]: exhaustive minimum-busy-time search for small instances.
//! - [`harness`]: experiment configuration, runs and comparison reports.

pub mod catalog;
pub mod energy;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod scenario_file;
pub mod schedulers;
pub mod timeline;
pub mod workload;

pub use model::{
    validate_scenario, HostId, HostSpec, MetricWeights, ModelError, PowerModel, ResourceVector,
    Scenario, Schedule, Seconds, VmId, VmRequest, VmType,
};

//! Experiment runner: schedules one scenario with a list of algorithms,
//! measures energy and compares every algorithm against PABFD.

mod config;
mod report;

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;

pub use config::{
    ExperimentConfig, FleetConfig, OutputConfig, PowerCurve, ScenarioSource, DEFAULT_WEIGHT_SWEEP,
};
pub use report::{emit_report, render_report, ComparisonRow, ReportError, ReportFormat, COLUMNS};

use crate::energy::{schedule_energy, EnergyError, EnergyReport};
use crate::model::{validate_scenario, ModelError, Scenario};
use crate::scenario_file::{read_records, ScenarioFileError};
use crate::schedulers::{schedule, SchedulerConfig};
use crate::workload::{jobs_to_vms, parse_swf, synth_workload, Diagnostic, SwfError, SynthError};

pub const BASELINE_LABEL: &str = "pabfd";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("reading {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario file")]
    ScenarioFile(#[source] ScenarioFileError),
    #[error("trace")]
    Swf(#[from] SwfError),
    #[error("synthetic workload")]
    Synth(#[from] SynthError),
    #[error("invalid scenario")]
    Scenario(#[from] ModelError),
    #[error("{label}")]
    Schedule {
        label: String,
        #[source]
        source: EnergyError,
    },
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("worker pool: {0}")]
    Pool(String),
}

impl From<ScenarioFileError> for HarnessError {
    fn from(e: ScenarioFileError) -> Self {
        match e {
            ScenarioFileError::Invalid(m) => HarnessError::Scenario(m),
            other => HarnessError::ScenarioFile(other),
        }
    }
}

impl HarnessError {
    /// The scenario itself cannot be scheduled as given (as opposed to a
    /// malformed config or unreadable input).
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            HarnessError::Scenario(_) | HarnessError::Schedule { .. }
        )
    }
}

/// Builds the validated scenario named by the config, with any skipped-input
/// diagnostics from trace conversion.
pub fn load_scenario(
    config: &ExperimentConfig,
) -> Result<(Scenario, Vec<Diagnostic>), HarnessError> {
    let open = |path: &PathBuf| {
        File::open(path)
            .map(BufReader::new)
            .map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })
    };
    let fleet = config.fleet.as_ref().map(FleetConfig::build);
    let (hosts, vms, diagnostics) = match &config.scenario {
        ScenarioSource::File { path } => {
            let (hosts, vms) = read_records(open(path)?)?;
            (fleet.unwrap_or(hosts), vms, Vec::new())
        }
        ScenarioSource::Swf { path, jobs } => {
            let trace = parse_swf(open(path)?)?;
            let conversion = jobs_to_vms(&trace.jobs, *jobs);
            let mut diagnostics = trace.diagnostics;
            diagnostics.extend(conversion.diagnostics);
            (fleet.unwrap_or_default(), conversion.vms, diagnostics)
        }
        ScenarioSource::Synth { seed, jobs, params } => {
            let vms = synth_workload(*seed, *jobs, params)?;
            (fleet.unwrap_or_default(), vms, Vec::new())
        }
    };
    Ok((validate_scenario(hosts, vms)?, diagnostics))
}

/// One scheduled and verified run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub label: String,
    pub time_weight: f64,
    pub energy: EnergyReport,
    pub hosts_used: usize,
    pub vms_placed: usize,
    pub unplaced: usize,
}

pub fn run_one(scenario: &Scenario, config: &SchedulerConfig) -> Result<RunOutcome, HarnessError> {
    let sched = schedule(scenario, config);
    let energy = schedule_energy(scenario, &sched).map_err(|source| HarnessError::Schedule {
        label: config.label(),
        source,
    })?;
    Ok(RunOutcome {
        label: config.label(),
        time_weight: config.weights.time,
        hosts_used: sched.hosts_used(),
        vms_placed: sched.placed_count(),
        unplaced: sched.unplaced().len(),
        energy,
    })
}

/// Runs every algorithm of `config` on `scenario` and returns one row per
/// algorithm in config order. Entries that use a busy-time weight run once
/// per sweep value and report the mean. The PABFD baseline is run even when
/// it is not listed, but only listed algorithms get a row.
pub fn run_on_scenario(
    scenario: &Scenario,
    config: &ExperimentConfig,
) -> Result<Vec<ComparisonRow>, HarnessError> {
    let mut algorithms = config.scheduler_configs()?;
    let listed = algorithms.len();
    if !config.algorithms.iter().any(|a| a == BASELINE_LABEL) {
        algorithms.push(SchedulerConfig::pabfd().with_weights(config.weights));
    }

    let mut jobs: Vec<(usize, SchedulerConfig)> = Vec::new();
    for (i, alg) in algorithms.iter().enumerate() {
        if alg.uses_time_weight() && !config.weight_sweep.is_empty() {
            for &w in &config.weight_sweep {
                jobs.push((i, alg.with_weights(alg.weights.with_time(w))));
            }
        } else {
            jobs.push((i, *alg));
        }
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let outcomes: Vec<(usize, RunOutcome)> = pool.install(|| {
        jobs.par_iter()
            .map(|(i, alg)| run_one(scenario, alg).map(|o| (*i, o)))
            .collect::<Result<_, _>>()
    })?;

    let mean = |i: usize, f: &dyn Fn(&RunOutcome) -> f64| {
        let runs: Vec<f64> = outcomes
            .iter()
            .filter(|(j, _)| *j == i)
            .map(|(_, o)| f(o))
            .collect();
        runs.iter().sum::<f64>() / runs.len() as f64
    };
    let baseline_index = algorithms
        .iter()
        .position(|a| a.label() == BASELINE_LABEL)
        .expect("baseline scheduled");
    let baseline = mean(baseline_index, &|o| o.energy.total_kwh);

    Ok((0..listed)
        .map(|i| {
            let energy = mean(i, &|o| o.energy.total_kwh);
            let normalized = if baseline > 0.0 {
                energy / baseline
            } else if energy == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
            ComparisonRow {
                algorithm: config.algorithms[i].clone(),
                hosts_used: mean(i, &|o| o.hosts_used as f64),
                vms_placed: mean(i, &|o| o.vms_placed as f64),
                energy_kwh: energy,
                saving_pct: if i == baseline_index {
                    0.0
                } else {
                    (1.0 - normalized) * 100.0
                },
                busy_time_s: mean(i, &|o| o.energy.total_busy_time as f64),
                normalized_energy: normalized,
                unplaced: mean(i, &|o| o.unplaced as f64),
                fleet_size: scenario.hosts().len(),
            }
        })
        .collect())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ComparisonRow>, HarnessError> {
    config.validate()?;
    let (scenario, _) = load_scenario(config)?;
    run_on_scenario(&scenario, config)
}

/// Writes one report per configured format; returns the written paths.
pub fn write_reports(
    rows: &[ComparisonRow],
    output: &OutputConfig,
) -> Result<Vec<PathBuf>, HarnessError> {
    output
        .formats
        .iter()
        .map(|f| Ok(emit_report(rows, *f, &output.dir, &output.name)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{ml110_g5_linear, six_vm_example, HOUR};

    fn config(algorithms: &[&str]) -> ExperimentConfig {
        ExperimentConfig {
            scenario: ScenarioSource::File {
                path: "unused".into(),
            },
            fleet: None,
            algorithms: algorithms.iter().map(|s| s.to_string()).collect(),
            weight_sweep: DEFAULT_WEIGHT_SWEEP.to_vec(),
            weights: Default::default(),
            output: Default::default(),
            workers: Some(2),
        }
    }

    #[test]
    fn six_vm_example_against_baseline() {
        let s = six_vm_example(3, ml110_g5_linear());
        let rows = run_on_scenario(&s, &config(&["pabfd", "eminret-1", "vbp-norm-l2"])).unwrap();
        assert_eq!(rows[0].algorithm, "pabfd");
        assert_eq!(rows[0].saving_pct, 0.0);
        assert_eq!(rows[0].normalized_energy, 1.0);
        assert_eq!(rows[1].busy_time_s, (14 * HOUR) as f64);
        assert!(rows[1].saving_pct > 0.0);
        assert_eq!(rows[2].busy_time_s, (20 * HOUR) as f64);
        for r in &rows {
            assert!(
                ((1.0 - r.energy_kwh / rows[0].energy_kwh) * 100.0 - r.saving_pct).abs() < 1e-9
            );
            assert_eq!(r.vms_placed + r.unplaced, 6.0);
        }
    }

    #[test]
    fn baseline_only_and_hidden_baseline() {
        let s = six_vm_example(3, ml110_g5_linear());
        let rows = run_on_scenario(&s, &config(&["pabfd"])).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].saving_pct, 0.0);
        let rows = run_on_scenario(&s, &config(&["mindft-st"])).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].algorithm, "mindft-st");
        assert!(rows[0].normalized_energy < 1.0);
    }

    #[test]
    fn empty_scenario_reports_zero_energy() {
        let s = validate_scenario(crate::catalog::default_fleet(2), vec![]).unwrap();
        let rows = run_on_scenario(&s, &config(&["pabfd", "eminret-3"])).unwrap();
        assert_eq!(rows[1].energy_kwh, 0.0);
        assert_eq!(rows[1].normalized_energy, 1.0);
    }
}

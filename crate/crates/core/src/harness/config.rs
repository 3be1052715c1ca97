use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::report::ReportFormat;
use super::HarnessError;
use crate::catalog::{ml110_g5_linear, ml110_g5_power, DEFAULT_HOST_CAPACITY};
use crate::model::{HostId, HostSpec, MetricWeights, ResourceVector};
use crate::schedulers::SchedulerConfig;
use crate::workload::SynthParams;

/// Busy-time weights every EMinRET/MinDFT entry is averaged over.
pub const DEFAULT_WEIGHT_SWEEP: [f64; 5] = [0.001, 0.01, 1.0, 100.0, 3600.0];

/// One experiment, read from a TOML document:
///
/// ```toml
/// algorithms = ["pabfd", "mindft-st", "eminret-1", "eminret-7"]
/// weight_sweep = [0.001, 0.01, 1, 100, 3600]   # optional, this is the default
/// workers = 4                                  # optional, default: all cores
///
/// [scenario]
/// source = "synth"        # "file" (path), "swf" (path, jobs) or "synth"
/// seed = 7
/// jobs = 200
///
/// [fleet]
/// hosts = 500
/// power = "table"         # or "linear"
///
/// [weights]               # optional resource weights
/// cpu = 940.0
///
/// [output]
/// dir = "results"
/// name = "report"
/// formats = ["csv", "markdown"]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSource,
    /// Required for trace and synthetic sources; replaces the hosts of a
    /// scenario file when given.
    #[serde(default)]
    pub fleet: Option<FleetConfig>,
    pub algorithms: Vec<String>,
    #[serde(default = "default_sweep")]
    pub weight_sweep: Vec<f64>,
    #[serde(default)]
    pub weights: MetricWeights,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_sweep() -> Vec<f64> {
    DEFAULT_WEIGHT_SWEEP.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScenarioSource {
    File {
        path: PathBuf,
    },
    Swf {
        path: PathBuf,
        jobs: usize,
    },
    Synth {
        seed: u64,
        jobs: usize,
        #[serde(default)]
        params: SynthParams,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerCurve {
    /// The measured 11-point utilization table.
    #[default]
    Table,
    /// Straight line between the table's idle and peak watts.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetConfig {
    pub hosts: usize,
    #[serde(default = "default_capacity")]
    pub capacity: ResourceVector,
    #[serde(default)]
    pub power: PowerCurve,
}

fn default_capacity() -> ResourceVector {
    DEFAULT_HOST_CAPACITY
}

impl FleetConfig {
    pub fn build(&self) -> Vec<HostSpec> {
        let power = match self.power {
            PowerCurve::Table => ml110_g5_power(),
            PowerCurve::Linear => ml110_g5_linear(),
        };
        (0..self.hosts as u64)
            .map(|id| HostSpec {
                id: HostId(id),
                capacity: self.capacity,
                power: power.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub name: String,
    pub formats: Vec<ReportFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("results"),
            name: "report".into(),
            formats: vec![ReportFormat::Csv],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; relative scenario and output paths are taken
    /// relative to the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        match &mut config.scenario {
            ScenarioSource::File { path } | ScenarioSource::Swf { path, .. } => {
                *path = base.join(&*path);
            }
            ScenarioSource::Synth { .. } => {}
        }
        config.output.dir = base.join(&config.output.dir);
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        self.scheduler_configs()?;
        if let Some(w) = self
            .weight_sweep
            .iter()
            .find(|w| !(w.is_finite() && **w >= 0.0))
        {
            return bad(format!(
                "weight_sweep entry {w} must be finite and non-negative"
            ));
        }
        if self.weights.validate().is_err() {
            return bad("weights must be finite and non-negative".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if self.output.formats.is_empty() {
            return bad("output.formats must name at least one format".into());
        }
        match (&self.scenario, &self.fleet) {
            (ScenarioSource::File { .. }, _) => {}
            (_, None) => return bad("trace and synthetic scenarios need a [fleet] section".into()),
            (ScenarioSource::Synth { params, jobs, .. }, _) => {
                if *jobs == 0 {
                    return bad("synthetic scenario needs at least one job".into());
                }
                params
                    .validate()
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
            }
            (ScenarioSource::Swf { .. }, _) => {}
        }
        Ok(())
    }

    /// The algorithms in config order.
    pub fn scheduler_configs(&self) -> Result<Vec<SchedulerConfig>, HarnessError> {
        self.algorithms
            .iter()
            .map(|label| {
                SchedulerConfig::from_label(label, self.weights)
                    .map_err(|e| HarnessError::Config(e.to_string()))
            })
            .collect()
    }
}

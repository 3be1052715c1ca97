use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use vmplace_core::catalog::default_fleet;
use vmplace_core::harness::{self, ExperimentConfig, ReportFormat, ScenarioSource};
use vmplace_core::oracle::{self, OracleError};
use vmplace_core::scenario_file::{self, ScenarioFileError};
use vmplace_core::workload::{self, SynthParams};
use vmplace_core::{validate_scenario, Scenario};

const CONFIG_ERROR: u8 = 2;
const INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "vmplace",
    version,
    about = "Energy-aware placement of fixed-interval VMs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert an SWF trace (or a synthetic workload) to a scenario file.
    Convert {
        /// SWF trace to read; without it a synthetic workload is generated.
        #[arg(long)]
        swf: Option<PathBuf>,
        /// Number of leading jobs to convert (or synthetic jobs to generate).
        #[arg(long)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
        /// Default hosts to include in the scenario file.
        #[arg(long, default_value_t = 0)]
        hosts: usize,
        /// Seed for synthetic workloads.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment config and write comparison reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report formats (csv, json, markdown), overriding the config.
        #[arg(long, value_delimiter = ',')]
        format: Vec<ReportFormat>,
        #[arg(long)]
        workers: Option<usize>,
        /// Seed of a synthetic scenario, overriding the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact minimum busy time of a small scenario, as JSON.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Check a scenario file.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn fail(code: u8) -> impl FnOnce(anyhow::Error) -> Failure {
    move |error| Failure { code, error }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

fn read_scenario(path: &Path) -> Result<Scenario, Failure> {
    let file = File::open(path)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(fail(CONFIG_ERROR))?;
    scenario_file::read_scenario(BufReader::new(file)).map_err(|e| {
        let code = match e {
            ScenarioFileError::Invalid(_) => INFEASIBLE,
            _ => CONFIG_ERROR,
        };
        Failure {
            code,
            error: anyhow!(e).context(format!("reading {}", path.display())),
        }
    })
}

fn convert(
    swf: Option<&Path>,
    jobs: usize,
    out: &Path,
    hosts: usize,
    seed: u64,
) -> Result<(), Failure> {
    let vms = match swf {
        Some(path) => {
            let file = File::open(path)
                .with_context(|| format!("opening {}", path.display()))
                .map_err(fail(CONFIG_ERROR))?;
            let trace = workload::parse_swf(BufReader::new(file))
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(fail(CONFIG_ERROR))?;
            let conversion = workload::jobs_to_vms(&trace.jobs, jobs);
            for d in trace.diagnostics.iter().chain(&conversion.diagnostics) {
                eprintln!("warning: {d}");
            }
            conversion.vms
        }
        None => workload::synth_workload(seed, jobs, &SynthParams::default())
            .map_err(|e| fail(CONFIG_ERROR)(e.into()))?,
    };
    let scenario =
        validate_scenario(default_fleet(hosts), vms).map_err(|e| fail(INFEASIBLE)(e.into()))?;
    let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    scenario_file::write_scenario(BufWriter::new(file), &scenario)
        .with_context(|| format!("writing {}", out.display()))?;
    eprintln!(
        "wrote {} VMs and {} hosts to {}",
        scenario.vms().len(),
        scenario.hosts().len(),
        out.display()
    );
    Ok(())
}

fn run(
    config: &Path,
    out: Option<PathBuf>,
    format: Vec<ReportFormat>,
    workers: Option<usize>,
    seed: Option<u64>,
) -> Result<(), Failure> {
    let harness_failure = |e: harness::HarnessError| Failure {
        code: if e.is_infeasible() {
            INFEASIBLE
        } else {
            CONFIG_ERROR
        },
        error: e.into(),
    };
    let mut cfg = ExperimentConfig::from_file(config).map_err(harness_failure)?;
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    if !format.is_empty() {
        cfg.output.formats = format;
    }
    if workers.is_some() {
        cfg.workers = workers;
    }
    if let Some(s) = seed {
        match &mut cfg.scenario {
            ScenarioSource::Synth { seed, .. } => *seed = s,
            _ => {
                return Err(fail(CONFIG_ERROR)(anyhow!(
                    "--seed only applies to synthetic scenarios"
                )))
            }
        }
    }
    cfg.validate().map_err(harness_failure)?;
    let (scenario, diagnostics) = harness::load_scenario(&cfg).map_err(harness_failure)?;
    for d in &diagnostics {
        eprintln!("warning: {d}");
    }
    let rows = harness::run_on_scenario(&scenario, &cfg).map_err(harness_failure)?;
    let paths = harness::write_reports(&rows, &cfg.output).map_err(|e| Failure {
        code: 1,
        error: e.into(),
    })?;
    print!(
        "{}",
        harness::render_report(&rows, ReportFormat::Markdown).map_err(anyhow::Error::from)?
    );
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn run_oracle(path: &Path) -> Result<(), Failure> {
    let scenario = read_scenario(path)?;
    let result = oracle::brute_force_min_busy_time(&scenario).map_err(|e| {
        let code = match e {
            OracleError::NoFeasibleAssignment => INFEASIBLE,
            OracleError::InstanceTooLarge { .. } => CONFIG_ERROR,
        };
        fail(code)(e.into())
    })?;
    let json = serde_json::to_string_pretty(&result).context("serializing result")?;
    println!("{json}");
    Ok(())
}

fn validate(path: &Path) -> Result<(), Failure> {
    let scenario = read_scenario(path)?;
    let span = scenario
        .vms()
        .iter()
        .map(|v| v.finish_time())
        .max()
        .unwrap_or(0)
        .saturating_sub(
            scenario
                .vms()
                .iter()
                .map(|v| v.start_time)
                .min()
                .unwrap_or(0),
        );
    println!(
        "ok: {} hosts, {} VMs, horizon {} s",
        scenario.hosts().len(),
        scenario.vms().len(),
        span
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convert {
            swf,
            jobs,
            out,
            hosts,
            seed,
        } => convert(swf.as_deref(), jobs, &out, hosts, seed),
        Command::Run {
            config,
            out,
            format,
            workers,
            seed,
        } => run(&config, out, format, workers, seed),
        Command::Oracle { scenario } => run_oracle(&scenario),
        Command::Validate { scenario } => validate(&scenario),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use iccbf::sim::{self, Grid, Scenario};
use iccbf::tuning::tune;
use iccbf::TuningInputs64;

/// Closed-loop simulator for ICCBF safety filters on integrator chains.
///
/// Exit status is 0 on success, 1 when an input fails validation and 2 when a
/// run violates a state constraint or hits an infeasible filter step.
#[derive(Parser)]
#[command(name = "iccbf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario, writing `trajectory.csv` and `summary.json`.
    Run {
        scenario: PathBuf,
        /// Output directory (default: current directory).
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a scenario over a parameter grid and print the aggregate report.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write the report to `DIR/sweep.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the gain tuning procedure and print the gains and margins.
    Tune { inputs: PathBuf },
    /// Validate a scenario without simulating it.
    Check { scenario: PathBuf },
}

enum Outcome {
    Clean,
    Unsafe,
}

/// Failures of the inputs themselves, reported with exit status 1.
struct Invalid(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ICCBF_LOG", "warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Unsafe) => ExitCode::from(2),
        Err(Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, Invalid> {
    Ok(
        Scenario::from_path(path)
            .with_context(|| format!("reading scenario {}", path.display()))?,
    )
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Invalid> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn execute(command: Command) -> Result<Outcome, Invalid> {
    match command {
        Command::Run { scenario, out } => {
            let log = sim::run(&load_scenario(&scenario)?)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let csv = out.join("trajectory.csv");
            log.write_csv_file(&csv)?;
            let summary = to_json(&log.summary)?;
            fs::write(out.join("summary.json"), &summary)?;
            log::info!("wrote {}", csv.display());
            println!("{summary}");
            Ok(if log.summary.is_clean() {
                Outcome::Clean
            } else {
                Outcome::Unsafe
            })
        }
        Command::Sweep {
            scenario,
            grid,
            jobs,
            out,
        } => {
            let base = load_scenario(&scenario)?;
            let text = fs::read_to_string(&grid)
                .with_context(|| format!("reading grid {}", grid.display()))?;
            let grid: Grid = serde_json::from_str(&text).context("parsing grid")?;
            let report = sim::sweep(&base, &grid, jobs)?;
            let json = to_json(&report)?;
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("sweep.json"), &json)?;
            }
            println!("{json}");
            if report.errors > 0 {
                log::error!(
                    "{} of {} grid points could not be run",
                    report.errors,
                    report.runs
                );
            }
            Ok(if report.is_clean() {
                Outcome::Clean
            } else if report.runs_with_violations + report.total_infeasible + report.total_undefined
                > 0
            {
                Outcome::Unsafe
            } else {
                return Err(Invalid(anyhow::anyhow!(
                    "some grid points failed validation"
                )));
            })
        }
        Command::Tune { inputs } => {
            let text = fs::read_to_string(&inputs)
                .with_context(|| format!("reading {}", inputs.display()))?;
            let inputs: TuningInputs64 =
                serde_json::from_str(&text).context("parsing tuning inputs")?;
            println!("{}", to_json(&tune(&inputs)?)?);
            Ok(Outcome::Clean)
        }
        Command::Check { scenario } => {
            let sim = load_scenario(&scenario)?.compile()?;
            println!(
                "ok: order {}, dimension {}, {} steps, {} filter constraints",
                sim.plant.order,
                sim.plant.dimension,
                sim.step_count(),
                sim.filter.constraints(&sim.initial_state)?.len()
            );
            Ok(Outcome::Clean)
        }
    }
}

//! Batch runner: one subcommand per scenario, one config per invocation.
//!
//! Exit codes: 0 success, 2 when a certificate verdict is false, 1 on any
//! error. The summary JSON is printed to stdout; artifacts land in the
//! output directory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nslab::config::{parse_config_for, Scenario};
use nslab::scenario::run_scenario;

#[derive(Parser)]
#[command(
    name = "nslab",
    about = "Spectral Galerkin runs: simulation, restriction, and uniqueness certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a `section.key = value` config file.
    #[arg(long)]
    config: PathBuf,

    /// Output directory for artifacts (overrides outputs.directory).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Master seed (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a trajectory and write diagnostics plus snapshots.
    Simulate(RunArgs),
    /// Build a hyperplane section and report its operator data.
    Restrict(RunArgs),
    /// Run a trajectory and evaluate the quadratic-form criterion.
    Certify(RunArgs),
    /// Solve the interpolation balance and estimate the constant.
    Gns(RunArgs),
    /// Run a perturbation experiment and check the difference bound.
    Uniqueness(RunArgs),
}

impl Command {
    fn scenario(&self) -> Scenario {
        match self {
            Command::Simulate(_) => Scenario::Simulate,
            Command::Restrict(_) => Scenario::Restrict,
            Command::Certify(_) => Scenario::Certify,
            Command::Gns(_) => Scenario::Gns,
            Command::Uniqueness(_) => Scenario::Uniqueness,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Simulate(a)
            | Command::Restrict(a)
            | Command::Certify(a)
            | Command::Gns(a)
            | Command::Uniqueness(a) => a,
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<i32> {
    let args = cli.command.args();
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| anyhow::anyhow!("reading {}: {e}", args.config.display()))?;
    let config = parse_config_for(&text, Some(cli.command.scenario()))?;
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.outputs.directory));
    let report = run_scenario(&config, &out_dir, args.seed)?;
    println!("{}", serde_json_pretty(&report.summary));
    Ok(report.exit_code)
}

fn serde_json_pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("summary serializes")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! Batch experiment runner for the transport pipelines: seeded, replayable,
//! CSV/SVG artifacts with a machine-readable summary.
//!
//! Exit codes: 0 pass, 2 tolerance failure, 3 invalid input, 4 internal
//! error.

mod config;
mod runner;
mod svg;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use runner::{execute, persist, replay, CommandKind, RunError, RunStatus};
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable naming the default output root.
const OUT_ROOT_ENV: &str = "GAUSS_OT_OUT";

#[derive(Parser)]
#[command(name = "gauss-ot", version, about = "transport experiment runner")]
struct Cli {
    /// TOML experiment configuration (defaults are built in)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// overrides the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// output directory (default: $GAUSS_OT_OUT/<command>-<seed> or
    /// ./runs/<command>-<seed>)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// overrides every tolerance in the config with one value
    #[arg(long, global = true)]
    tol_override: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// solve one random transport instance and certify the duality gap
    Solve,
    /// decompose an optimal plan of a collinear instance into rays
    Rays,
    /// build and verify the glued monotone transport map
    Glue,
    /// measure the interpolated-mass constant for a 1D density pair
    VerifyEvolution,
    /// sweep the Jacobian concavity bound over random eigenvalue tuples
    JacobianSweep,
    /// run the dimension ladder and check cost saturation
    Ladder,
    /// re-run a summarized experiment and demand bit-identical artifacts
    Replay {
        /// summary.json produced by a previous run
        summary: PathBuf,
    },
}

fn command_kind(cmd: &Command) -> Option<CommandKind> {
    match cmd {
        Command::Solve => Some(CommandKind::Solve),
        Command::Rays => Some(CommandKind::Rays),
        Command::Glue => Some(CommandKind::Glue),
        Command::VerifyEvolution => Some(CommandKind::VerifyEvolution),
        Command::JacobianSweep => Some(CommandKind::JacobianSweep),
        Command::Ladder => Some(CommandKind::Ladder),
        Command::Replay { .. } => None,
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, RunError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Invalid(format!("cannot read config: {e}")))?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol_override {
        if tol <= 0.0 {
            return Err(RunError::Invalid("tolerance override must be positive".into()));
        }
        cfg.tolerances.gap = tol;
        cfg.tolerances.evolution_slack = tol;
        cfg.tolerances.cost_match = tol;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, kind: CommandKind, seed: u64) -> PathBuf {
    if let Some(dir) = &cli.out {
        return dir.clone();
    }
    let root = std::env::var_os(OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"));
    root.join(format!("{}-{}", kind.as_str(), seed))
}

fn run(cli: &Cli) -> Result<bool, RunError> {
    if let Command::Replay { summary } = &cli.command {
        let outcome = replay(summary)?;
        if outcome.pass {
            println!("replay: pass");
        } else {
            for failure in &outcome.failures {
                eprintln!("replay mismatch: {failure}");
            }
        }
        return Ok(outcome.pass);
    }

    let kind = command_kind(&cli.command).expect("replay handled above");
    let cfg = load_config(cli)?;
    let output = execute(kind, &cfg)?;
    let dir = out_dir(cli, kind, cfg.seed);
    let summary = persist(&output, &cfg, &dir)?;
    for (name, _) in &output.artifacts {
        println!("wrote {}", dir.join(name).display());
    }
    println!("wrote {}", summary.display());
    for (key, value) in &output.metrics {
        println!("{key} = {value}");
    }
    match &output.status {
        RunStatus::Pass => {
            println!("status: pass");
            Ok(true)
        }
        RunStatus::ToleranceFailure(detail) => {
            eprintln!("status: tolerance failure — {detail}");
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(RunError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(RunError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(4)
        }
    }
}

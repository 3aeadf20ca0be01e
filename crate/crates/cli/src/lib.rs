//! Command-line front end: scenario files, run directories and the
//! `adiabat` subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

pub use config::{load_scenario, load_scenario_file, ConfigError, ModeName, Scenario};
pub use run::{execute, RunOptions, RunReport};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for configuration or validation failures.
pub const EXIT_INVALID: i32 = 1;
/// Exit status for failures while running.
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_INVALID,
            CliError::Io { .. } | CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "adiabat", version, about = "Steered two-level open-system simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory with the configured variant.
    Simulate(CommonArgs),
    /// One trajectory per period listed under [sweep].
    Sweep(CommonArgs),
    /// Full, secular and non-steered equations on the same scenario.
    Compare(CommonArgs),
    /// Geometric phases for the cone angles listed under [berry].
    Berry(CommonArgs),
    /// Check the scenario and run seeded consistency checks on it.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Random draws per check.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Directory receiving run directories.
    #[arg(long, value_name = "DIR", default_value = "runs")]
    pub out: PathBuf,
    /// Worker threads for sweep, compare and berry runs.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub jobs: usize,
    /// Seed for randomised checks.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub seed: u64,
}

impl CommonArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            out: self.out.clone(),
            jobs: self.jobs,
            seed: self.seed,
        }
    }
}

fn read_scenario(args: &CommonArgs, mode: Option<ModeName>) -> Result<Scenario, CliError> {
    let sc = load_scenario_file(&args.config)?;
    Ok(match mode {
        Some(m) if m != sc.mode() => sc.with_mode(m)?,
        _ => sc,
    })
}

/// Runs a parsed command line and returns the process exit status.
pub fn run_cli(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let (args, mode) = match &cli.command {
        Command::Simulate(a) => (a, ModeName::Simulate),
        Command::Sweep(a) => (a, ModeName::Sweep),
        Command::Compare(a) => (a, ModeName::Compare),
        Command::Berry(a) => (a, ModeName::Berry),
        Command::Validate { common, samples } => return validate(common, *samples),
    };
    let sc = read_scenario(args, Some(mode))?;
    let report = execute(&sc, &args.options())?;
    println!("{}", report.dir.display());
    if report.failed {
        for e in &report.errors {
            eprintln!("error: {e}");
        }
        return Ok(EXIT_RUNTIME);
    }
    Ok(EXIT_OK)
}

fn validate(args: &CommonArgs, samples: usize) -> Result<i32, CliError> {
    let sc = read_scenario(args, None)?;
    let results = checks::run_checks(&sc, args.seed, samples);
    let mut ok = true;
    for r in &results {
        ok &= r.passed;
        println!(
            "[{}] {}: worst {:.3e} (limit {:.3e}), {}",
            if r.passed { "ok" } else { "FAIL" },
            r.name,
            r.worst,
            r.limit,
            r.detail
        );
    }
    let dir = run::create_run_dir(&args.out, &sc)?;
    let meta = json!({
        "tool": "adiabat",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": "validate",
        "scenario_hash": sc.hash(),
        "scenario_toml": sc.canonical(),
        "started_utc": chrono::Utc::now().to_rfc3339(),
        "seed": args.seed,
        "samples": samples,
        "failed": !ok,
        "checks": results,
    });
    let path = dir.join("metadata.json");
    std::fs::write(&path, serde_json::to_string_pretty(&meta).expect("metadata serialises"))
        .map_err(|e| CliError::io(&path, e))?;
    println!("{}", dir.display());
    Ok(if ok { EXIT_OK } else { EXIT_INVALID })
}

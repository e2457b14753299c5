//! Experiment harness for repeated games of learning agents and the
//! declaration meta-game between their users.
//!
//! Exit codes: 0 success, 2 a `--check` assertion failed, 1 error.

mod commands;
mod scenario;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use commands::{Formats, RunContext};
use scenario::{parse_seeds, Scenario};

#[derive(Parser)]
#[command(
    name = "metagames",
    about = "Simulate repeated games of regret-minimizing agents and analyze \
             the declaration meta-game between their users",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario JSON file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Seed or inclusive seed range, e.g. `7` or `1..20`.
    #[arg(long, global = true, default_value = "1")]
    seeds: String,

    /// Horizon override (rounds).
    #[arg(long, global = true)]
    horizon: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Comma-separated output formats: csv,json,svg.
    #[arg(long, global = true, default_value = "csv,json")]
    format: String,

    /// Evaluate the scenario's acceptance checks; exit 2 on failure.
    #[arg(long, global = true)]
    check: bool,

    /// Worker threads for seed ensembles (default: available parallelism;
    /// the METAGAME_THREADS environment variable also applies).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated-play dynamics and export traces.
    Simulate,
    /// Solve a game: mixed/pure equilibria, elimination, commitment values.
    Equilibrium,
    /// Analyze the declaration meta-game of a scenario.
    Metagame,
    /// Drive oscillating schedule dynamics across phases.
    Oscillate,
    /// Error-vs-horizon table over a seed ensemble.
    Scaling,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("checks failed");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let threads = cli.threads.or_else(|| {
        std::env::var("METAGAME_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("building thread pool")?;
    }

    let path = cli
        .scenario
        .as_ref()
        .context("--scenario <path> is required")?;
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let scenario: Scenario =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;

    let expected = match cli.command {
        Command::Simulate => "simulate",
        Command::Equilibrium => "equilibrium",
        Command::Metagame => "metagame",
        Command::Oscillate => "oscillate",
        Command::Scaling => "scaling",
    };
    if scenario.kind() != expected {
        bail!(
            "scenario kind {:?} does not match the {expected} command",
            scenario.kind()
        );
    }

    let ctx = RunContext {
        seeds: parse_seeds(&cli.seeds)?,
        horizon: cli.horizon,
        out: cli.out.clone(),
        formats: Formats::parse(&cli.format)?,
        check: cli.check,
    };
    if ctx.seeds.is_empty() {
        bail!("empty seed list");
    }

    match &scenario {
        Scenario::Simulate(s) => commands::cmd_simulate(s, &ctx),
        Scenario::Equilibrium(s) => commands::cmd_equilibrium(s, &ctx),
        Scenario::Metagame(s) => commands::cmd_metagame(s, &ctx),
        Scenario::Oscillate(s) => commands::cmd_oscillate(s, &ctx),
        Scenario::Scaling(s) => commands::cmd_scaling(s, &ctx),
    }
}

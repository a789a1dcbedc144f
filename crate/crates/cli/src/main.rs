use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rmab_cli::{cmd_bound, cmd_compare, cmd_run, cmd_sweep, cmd_validate, Overrides, SweepParam};

/// Restless bandit experiments: validate configs, run Monte Carlo regret
/// curves, compare policies, evaluate bounds and sweep parameters.
#[derive(Debug, Parser)]
#[command(name = "rmab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Config file, or `builtin:fig4` / `builtin:fig5`.
    #[arg(long)]
    config: String,
    /// Output table; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed override.
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    horizon: Option<u64>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides { seed: self.seed, runs: self.runs, horizon: self.horizon }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check arm chains and report the D condition.
    Validate {
        #[arg(long)]
        config: String,
    },
    /// Run the configured experiment.
    Run {
        #[command(flatten)]
        args: RunArgs,
        /// Write the per-play trace of the first run here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run two configs on the same sample times and report the final regret ratio.
    Compare {
        #[command(flatten)]
        args: RunArgs,
        /// Second config.
        #[arg(long)]
        against: String,
    },
    /// Evaluate the closed-form bounds at the given times.
    Bound {
        #[arg(long)]
        config: String,
        /// Comma-separated times.
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<u64>,
    },
    /// One curve per parameter value.
    Sweep {
        #[command(flatten)]
        args: RunArgs,
        /// D, L, runs, horizon or players.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

fn print(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e).context("writing stdout"),
        _ => Ok(()),
    }
}

fn emit(table: &str, out: &Option<PathBuf>) -> Result<()> {
    if out.is_none() {
        print(table)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring threads")?;
    }
    match cli.command {
        Command::Validate { config } => print(&cmd_validate(&config)?)?,
        Command::Run { args, trace } => {
            let table = cmd_run(&args.config, args.out.as_deref(), &args.overrides(), trace.as_deref())?;
            emit(&table, &args.out)?;
        }
        Command::Compare { args, against } => {
            let (table, s) = cmd_compare(&args.config, &against, args.out.as_deref(), &args.overrides())?;
            emit(&table, &args.out)?;
            eprintln!("t={} regret_a={} regret_b={} ratio={}", s.t_end, s.regret_a, s.regret_b, s.ratio);
        }
        Command::Bound { config, t } => print(&cmd_bound(&config, &t)?)?,
        Command::Sweep { args, param, values } => {
            let table = cmd_sweep(&args.config, param, &values, args.out.as_deref(), &args.overrides())?;
            emit(&table, &args.out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

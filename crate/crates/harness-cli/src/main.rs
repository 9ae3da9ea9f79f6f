//! `aic-lab`: run controller experiments from TOML configs.
//!
//! Exit codes: 0 success, 1 missing input or I/O failure, 2 config schema
//! violation, 3 divergence (a single run blew up, or the gradient self-test
//! found a breach). Sweeps record per-episode divergence in `summary.csv`
//! and still exit 0.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use harness_cli::{cmd_gradcheck, cmd_run, cmd_sweep, CliError, RunOptions};

#[derive(Parser)]
#[command(
    name = "aic-lab",
    version,
    about = "Active-inference controller experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (TOML)
    config: PathBuf,
    /// Output directory (default: $AIC_LAB_OUT/<config stem>, or runs/<config stem>)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: one per core); results do not
    /// depend on this
    #[arg(long)]
    workers: Option<usize>,
    /// Replace the config's seed
    #[arg(long)]
    seed_override: Option<u64>,
    /// Also write an SVG line plot per episode
    #[arg(long)]
    emit_plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config; a [sweep] section makes this behave like `sweep`
    Run(CommonArgs),
    /// Run the config's [sweep] grid (required)
    Sweep(CommonArgs),
    /// Self-test: randomized gradient consistency battery
    Gradcheck {
        /// Test fixture: flip one analytic sign per check to prove the gate
        /// fails closed
        #[arg(long, hide = true)]
        canary: bool,
    },
}

impl CommonArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            out: self.out.clone(),
            workers: self.workers,
            seed_override: self.seed_override,
            emit_plots: self.emit_plots,
        }
    }
}

fn real_main() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let out = cmd_run(&args.config, &args.options())?;
            println!("wrote {}", out.display());
        }
        Command::Sweep(args) => {
            let out = cmd_sweep(&args.config, &args.options())?;
            println!("wrote {}", out.display());
        }
        Command::Gradcheck { canary } => cmd_gradcheck(canary)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("aic-lab: {}: {err}", err.kind());
            ExitCode::from(err.exit_code())
        }
    }
}

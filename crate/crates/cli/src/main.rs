//! `splitdg`: configuration-driven runner for the split-form DG laboratory.

mod config;
mod output;
mod run;
mod svg;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use splitdg_core::Execution;

use config::{ExperimentConfig, Mode};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {}", .0.display(), .1)]
    Io(PathBuf, String),
    #[error(transparent)]
    Core(#[from] splitdg_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    PropertyFailure,
}

#[derive(Parser)]
#[command(name = "splitdg", version, about = "Split-form DGSEM stability laboratory")]
struct Cli {
    /// Worker threads for sweeps and property checks (1 runs sequentially).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Overrides the configured random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the experiment in the configured mode.
    Run { config: PathBuf },
    /// Runs the configuration grid as a sweep and writes sweep.csv.
    Sweep { config: PathBuf },
    /// Runs the built-in property suite.
    Verify {
        /// Only checks whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
}

fn execution(jobs: Option<usize>) -> Result<Execution, CliError> {
    match jobs {
        Some(0) => Err(CliError::Config("--jobs must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(j) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build_global()
                .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::default()),
    }
}

fn dispatch(cli: Cli) -> Result<Status, CliError> {
    let exec = execution(cli.jobs)?;
    let (path, forced) = match cli.command {
        Command::Verify { filter } => return Ok(verify::run(filter.as_deref(), cli.seed.unwrap_or(0), exec)),
        Command::Run { config } => (config, None),
        Command::Sweep { config } => (config, Some(Mode::Sweep)),
    };
    let mut cfg = ExperimentConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = cli.out_dir {
        cfg.out_dir = dir;
    }
    let mode = forced.unwrap_or(cfg.mode);
    let ctx = run::Context {
        out_dir: cfg.out_dir.clone(),
        exec,
    };
    run::run(&cfg, mode, &ctx)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::PropertyFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

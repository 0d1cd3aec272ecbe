//! `pdelab`: run Poisson surrogate experiments from a JSON config and write
//! plot-ready CSV/JSON artifacts plus a run manifest.

mod artifacts;
mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::RunContext;
use crate::config::{ExperimentConfig, Format};

const THREADS_ENV: &str = "PDELAB_THREADS";

type Handler = fn(&RunContext) -> Result<PathBuf, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn from_core(e: pdelab_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }

    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{what}: {m}")),
            CliError::MissingInput(m) => CliError::MissingInput(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::MissingInput(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pdelab",
    version,
    about = "1D Poisson solver, regression and neural surrogate lab"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the primary seed of the sub-command.
    #[arg(long)]
    seed: Option<u64>,
    /// Format of plot series; overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic and finite-difference solutions for `problem.cases`.
    Solve(RunArgs),
    /// Least-squares line fit on synthetic `regression` data.
    Fit(RunArgs),
    /// Steepest-descent training on synthetic `regression` data.
    TrainAnn(RunArgs),
    /// Generate, split, train, evaluate and time a surrogate.
    Surrogate(RunArgs),
    /// Break-even prediction count for the times in `costs`.
    Breakeven(RunArgs),
    /// Question-by-question summary of a run directory.
    Report { run_dir: PathBuf },
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn context(command: &'static str, args: RunArgs) -> Result<RunContext, CliError> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        match command {
            "fit" | "train-ann" => {
                if let Some(r) = config.regression.as_mut() {
                    r.seed = seed;
                }
            }
            "surrogate" => {
                if let Some(s) = config.space.as_mut() {
                    s.master_seed = seed;
                }
            }
            _ => eprintln!("warning: --seed has no effect on `{command}`"),
        }
    }
    let output = config.output.clone();
    let out = args
        .out
        .or_else(|| {
            output
                .as_ref()
                .and_then(|o| o.dir.as_ref().map(PathBuf::from))
        })
        .unwrap_or_else(|| PathBuf::from("out"));
    let format = args
        .format
        .or(output.and_then(|o| o.format))
        .unwrap_or(Format::Csv);
    Ok(RunContext {
        command,
        config,
        out,
        format,
        threads: threads_from_env()?,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, args, f): (_, _, Handler) = match cli.command {
        Command::Solve(a) => ("solve", a, commands::cmd_solve),
        Command::Fit(a) => ("fit", a, commands::cmd_fit),
        Command::TrainAnn(a) => ("train-ann", a, commands::cmd_train_ann),
        Command::Surrogate(a) => ("surrogate", a, commands::cmd_surrogate),
        Command::Breakeven(a) => ("breakeven", a, commands::cmd_breakeven),
        Command::Report { run_dir } => {
            print!("{}", report::render(&run_dir)?);
            return Ok(());
        }
    };
    let manifest = f(&context(name, args)?)?;
    println!("manifest: {}", manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pdelab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `lipsharp`: construct, probe, verify and plot the sharpness example.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error.

mod config;
mod construct;
mod gradcheck;
mod output;
mod plot;
mod probe;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lipsharp::cubetree::Mode;

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration; exit code 2.
    Config(String),
    /// A check or probe failed; exit code 1.
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Strict,
    Relaxed,
}

#[derive(Debug, Parser)]
#[command(name = "lipsharp", version, about = "Sharpness example for lip-differentiability: construction and certified checks")]
struct Cli {
    /// JSON run configuration; defaults apply to missing fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Deepest probe level.
    #[arg(long, global = true, value_name = "K")]
    depth: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Seed for randomized chains, curves and fields.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the parameter sequence and write `manifest.json`.
    Construct,
    /// Probe chains and write `probe.csv`.
    Probe {
        /// Chain id such as `-255,-255/-1023,-1023`; `root` or an empty id
        /// probes along the first selected child. Repeatable. Without it,
        /// `chains` random chains are drawn.
        #[arg(long, value_name = "ID")]
        chain: Vec<String>,
    },
    /// Run the invariant suites and write `verify.json`.
    Verify {
        /// Comma-separated suite names; overrides the config.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        suites: Option<Vec<String>>,
    },
    /// Write SVG plots.
    Plot {
        #[arg(value_enum)]
        artifacts: Vec<plot::Artifact>,
        /// Level of the cube drawn by `layout`.
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Chaining, maximal function and Hajłasz checks against a capacity bump.
    Gradcheck {
        /// CSV field (`node,value`) to use for the maximal-function checks.
        #[arg(long, value_name = "PATH")]
        field: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(d) = cli.depth {
        cfg.depth = d;
    }
    if let Some(m) = cli.mode {
        cfg.mode = match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Relaxed => Mode::Relaxed,
        };
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = load_config(&cli)?;
    match cli.command {
        Command::Construct => construct::run(&cfg),
        Command::Probe { chain } => probe::run(&cfg, &chain),
        Command::Verify { suites } => {
            if suites.is_some() {
                cfg.suites = suites.map(|s| s.into_iter().filter(|x| !x.trim().is_empty()).collect());
            }
            verify::run(&cfg)
        }
        Command::Plot { artifacts, level } => plot::run(&cfg, &artifacts, level),
        Command::Gradcheck { field } => gradcheck::run(&cfg, field.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lipsharp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

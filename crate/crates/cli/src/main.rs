//! `fock-toeplitz`: build Toeplitz truncations, commutators and criterion
//! reports from an experiment config.
//!
//! Exit codes: 0 success, 1 runtime or accuracy failure, 2 configuration
//! error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fock_toeplitz::special::QuadratureSpec;

use crate::config::{ExperimentConfig, Format};
use crate::output::Output;

const THREADS_VAR: &str = "FOCK_TOEPLITZ_THREADS";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<fock_toeplitz::Error> for CliError {
    fn from(e: fock_toeplitz::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

impl FormatArg {
    fn formats(self) -> Vec<Format> {
        match self {
            FormatArg::Json => vec![Format::Json],
            FormatArg::Csv => vec![Format::Csv],
            FormatArg::Both => vec![Format::Json, Format::Csv],
        }
    }
}

#[derive(Parser)]
#[command(name = "fock-toeplitz", version, about = "Toeplitz operators on Fock-Sobolev spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Output formats; overrides `output.formats`.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Write the truncated matrices of u (and v) for every s.
    Matrix,
    /// Write [T_u, T_v] and its residual on the exactness window.
    Commutator,
    /// Evaluate the Φ/Ψ functional equations and issue a verdict.
    Criterion,
    /// Recover angular modes from polar samples.
    Decompose,
    /// Run the acceptance suite.
    Selftest,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("cannot configure thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    if let Command::Selftest = cli.command {
        let quad = match &cli.config {
            Some(p) => ExperimentConfig::load(p)?.quadrature(),
            None => QuadratureSpec::default(),
        };
        let formats = cli.format.map_or(vec![Format::Json], FormatArg::formats);
        let out = cli.out.as_deref().map(|d| Output::new(d, &formats, cli.quiet)).transpose()?;
        return commands::selftest(out.as_ref(), &quad, cli.quiet);
    }

    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required for this command".into()))?;
    let cfg = ExperimentConfig::load(path)?;
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    let formats = cli.format.map_or_else(|| cfg.output.formats.clone(), FormatArg::formats);
    let out = Output::new(&dir, &formats, cli.quiet)?;
    match cli.command {
        Command::Matrix => commands::matrix(&cfg, &out),
        Command::Commutator => commands::commutator_cmd(&cfg, &out),
        Command::Criterion => commands::criterion(&cfg, &out),
        Command::Decompose => commands::decompose_cmd(&cfg, &out),
        Command::Selftest => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

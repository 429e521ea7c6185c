//! `seqweak`: weak values, coupling sweeps, simulated camera frames and
//! self-verification from the command line.

mod commands;
mod config;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use seqweak::Error;

use config::ConfigFile;

#[derive(Debug, Parser)]
#[command(
    name = "seqweak",
    version,
    about = "Sequential weak values and joint pointer deflections"
)]
struct Cli {
    /// Plain-text `key = value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Standard or sequential weak value with its anomaly verdict.
    WeakValue(commands::WeakValueArgs),
    /// Sweep the coupling strength and write a CSV dataset.
    Sweep(commands::SweepArgs),
    /// Simulate the optical train at one coupling and write a 16-bit PGM.
    Image(commands::ImageArgs),
    /// Run the built-in consistency checks.
    Verify(commands::VerifyArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 5,
            CliError::Core(e) => match e {
                Error::OrthogonalPostselection { .. } => 3,
                Error::Engine { .. } => 4,
                Error::NotNormalized { .. }
                | Error::NotHermitian
                | Error::InvalidArgument(_)
                | Error::InvalidGrid(_) => 2,
                Error::Io { .. } | Error::Csv(_) => 1,
                _ => 4,
            },
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::WeakValue(args) => {
            cfg.check_keys("weak-value", &[])?;
            commands::weak_value_cmd(args)
        }
        Command::Sweep(args) => commands::sweep_cmd(args, &cfg),
        Command::Image(args) => commands::image_cmd(args, &cfg),
        Command::Verify(args) => {
            cfg.check_keys("verify", &[])?;
            commands::verify_cmd(args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

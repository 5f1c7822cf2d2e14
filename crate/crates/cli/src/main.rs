//! `sqlaser`: figure scans and oracle checks driven by a TOML config,
//! writing CSV.

mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::config::{ModeSelection, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "sqlaser", version, about = "Driven emitter in a cavity with a band-gap reservoir")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (flat TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// CSV output path; stdout if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the configured coupling mode.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeSelection>,

    /// No summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// All eleven steady moments: exact solve, closed form, optional oracle.
    Steady,
    /// Photon number against cavity detuning.
    ScanDetuning,
    /// Normally ordered quadrature variance against phase or drive ratio.
    Variance,
    /// Incoherent spectrum for a list of cavity detunings.
    Spectrum,
    /// Incoherent and squeezing spectra on one grid.
    Squeezing,
    /// Moment solve against the master-equation oracle and closed forms.
    OracleCheck,
    /// Effective equation against the time-dependent one for several Omega.
    ValidateEffective,
}

fn run(cli: &Cli) -> Result<bool> {
    let path = cli.config.as_ref().context("--config is required")?;
    let mut config = RunConfig::load(path)?;
    if let Some(mode) = cli.mode {
        config.mode = mode;
    }
    let outcome = match cli.command {
        Command::Steady => commands::steady(&config),
        Command::ScanDetuning => commands::scan_detuning(&config),
        Command::Variance => commands::variance(&config),
        Command::Spectrum => commands::spectrum(&config),
        Command::Squeezing => commands::squeezing(&config),
        Command::OracleCheck => commands::oracle_check(&config),
        Command::ValidateEffective => commands::validate_effective(&config),
    }?;
    match &cli.out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            outcome.table.write(&mut w)?;
            w.flush()?;
        }
        None => outcome.table.write(io::stdout().lock())?,
    }
    if !cli.quiet {
        eprintln!("{}", outcome.summary);
    }
    Ok(outcome.success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more checks failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

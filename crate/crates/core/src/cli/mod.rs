//! Command-line front end: each subcommand computes one or more tables and
//! writes them as CSV with a `.meta.toml` sidecar holding the resolved
//! configuration.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_kappa_map, cmd_modes, cmd_protocol, cmd_radiation, cmd_rate_model, cmd_storage_sweep,
    cmd_validate_truncation, storage_analysis, StorageOutcome, TRUNCATION_GUARD,
};
pub use output::{num, write_table, Table, SCHEMA_VERSION};

use crate::config::RunConfig;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "chainsim", version, about = "Collective dynamics of a sub-wavelength atomic chain")]
pub struct Cli {
    /// TOML run configuration; defaults apply to every missing key.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set geometry.n_atoms=10`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single- and two-excitation eigenmodes and the analytic dispersion.
    Modes,
    /// Excite, transfer, store and emit; time series and per-mode emission.
    Protocol,
    /// Transition time over chain sizes and illumination areas.
    StorageSweep,
    /// Compare truncations n_max = 1, 2, 3 on a small chain.
    ValidateTruncation,
    /// Far-field pattern at a snapshot of the protocol.
    Radiation {
        /// Snapshot time; defaults to the end of the first emission transfer.
        #[arg(long)]
        snapshot: Option<f64>,
    },
    /// Rate-model cascade and closed forms for the configured chain.
    RateModel,
    /// κ over the sweep's chain sizes and spacings.
    KappaMap,
    /// Print the resolved configuration.
    PrintConfig,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Modes => "modes",
            Command::Protocol => "protocol",
            Command::StorageSweep => "storage-sweep",
            Command::ValidateTruncation => "validate-truncation",
            Command::Radiation { .. } => "radiation",
            Command::RateModel => "rate-model",
            Command::KappaMap => "kappa-map",
            Command::PrintConfig => "print-config",
        }
    }

    /// Computes the tables of this command.
    pub fn tables(&self, cfg: &RunConfig) -> Result<Vec<Table>> {
        match self {
            Command::Modes => cmd_modes(cfg),
            Command::Protocol => cmd_protocol(cfg),
            Command::StorageSweep => cmd_storage_sweep(cfg),
            Command::ValidateTruncation => cmd_validate_truncation(cfg),
            Command::Radiation { snapshot } => cmd_radiation(cfg, *snapshot),
            Command::RateModel => cmd_rate_model(cfg),
            Command::KappaMap => cmd_kappa_map(cfg),
            Command::PrintConfig => Ok(Vec::new()),
        }
    }
}

/// Resolves the configuration, runs the command and writes its outputs.
/// Returns the written CSV paths.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = RunConfig::resolve(cli.config.as_deref(), &cli.overrides)?;
    if let Command::PrintConfig = cli.command {
        print!("{}", cfg.to_toml_string()?);
        return Ok(Vec::new());
    }
    cli.command
        .tables(&cfg)?
        .iter()
        .map(|t| write_table(&cfg.output.directory, cli.command.name(), t, &cfg))
        .collect()
}

/// Machine-readable failure record printed on stderr.
pub fn error_record(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

/// Entry point of the `chainsim` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_record(&e));
            ExitCode::FAILURE
        }
    }
}

//! Command-line driver: construct | embed | perturb | verify.
//!
//! All commands read a JSON config, write their outputs (series JSON,
//! certificates with embedded CSV tables, growth-table CSV) into --out, and
//! exit 0 only when every produced certificate passes. Failures print a
//! machine-readable error object on stderr.
//!
//! Exit codes: 0 pass, 1 certificate failure, 2 invalid input, 3 budget.

mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bohrstrip_core::io::series_from_str;
use bohrstrip_core::Certificate;
use output::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "bohrstrip", version, about = "sparse Dirichlet-series constructions with numeric certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the block-sum polynomial and its growth + norm certificates
    Construct {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// overrides the seed from the config file
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build an l1 or l2 embedding image with its isometry certificate
    Embed {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Perturb a base polynomial and certify the growth inequality
    Perturb {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recompute a certificate from its series and compare
    Verify {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
    },
}

fn read_config<T: serde::de::DeserializeOwned>(path: &PathBuf) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("malformed config {}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Construct { config, out, seed } => {
            let mut cfg: config::ConstructConfig = read_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            commands::cmd_construct(&cfg, &out)
        }
        Command::Embed { config, out, seed } => {
            let mut cfg: config::EmbedConfig = read_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            commands::cmd_embed(&cfg, &out)
        }
        Command::Perturb { config, out, seed } => {
            let mut cfg: config::PerturbConfig = read_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            commands::cmd_perturb(&cfg, &out)
        }
        Command::Verify {
            series,
            certificate,
        } => {
            let series_text = std::fs::read_to_string(&series).map_err(|e| {
                CliError::Invalid(format!("cannot read series {}: {e}", series.display()))
            })?;
            let parsed = series_from_str(&series_text)?;
            let cert_text = std::fs::read_to_string(&certificate).map_err(|e| {
                CliError::Invalid(format!(
                    "cannot read certificate {}: {e}",
                    certificate.display()
                ))
            })?;
            let cert: Certificate = serde_json::from_str(&cert_text).map_err(|e| {
                CliError::Invalid(format!("malformed certificate: {e}"))
            })?;
            let cert_dir = certificate
                .parent()
                .map(|p| p.to_path_buf())
                .unwrap_or_else(|| PathBuf::from("."));
            verify::verify(&parsed, &cert, &cert_dir)?;
            println!(
                "verify: {:?} certificate reproduced, verdict {:?}",
                cert.kind, cert.verdict
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

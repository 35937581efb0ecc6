//! `tpc` — deterministic experiments on non-binary turbo product codes.
//!
//! Every subcommand reads one flat `key = value` configuration (file plus
//! command-line overrides), runs a fully seeded experiment, and writes a CSV
//! table whose comment line repeats the resolved configuration. Exit codes:
//! 0 success, 2 configuration error, 3 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tpc_cli::config::Config;
use tpc_cli::experiments;

#[derive(Parser)]
#[command(name = "tpc", version, about = "Turbo product code experiments")]
struct Cli {
    /// Configuration file (one `key = value` per line, `#` comments).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Inline override applied after the file, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Shorthand for `--set seed=…`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Shorthand for `--set workers=…` (never affects results).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Write the table here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Block-error-rate curve of the iterative product decoder.
    Bler,
    /// Monte-Carlo achievable rates of the three demodulation schemes.
    Mi,
    /// Eb/N0 thresholds where each scheme supports the configured rate.
    Threshold,
    /// Group-versus-bit rate gap created by short codes themselves.
    Endo,
    /// Encode one component-code message (debugging aid).
    Encode,
    /// List-decode one component word from channel LLRs (debugging aid).
    Decode,
    /// Print the resolved configuration and exit.
    Config,
}

enum AppError {
    Config(String),
    Runtime(String),
}

fn build_config(cli: &Cli) -> Result<Config, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Config::parse_str(&text)?
        }
        None => Config::default(),
    };
    for pair in &cli.set {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("--set expects key=value, got '{pair}'"))?;
        cfg.set(key.trim(), value.trim())?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), AppError> {
    let cfg = build_config(cli).map_err(AppError::Config)?;
    let table = match cli.command {
        Command::Bler => {
            experiments::validate_bler(&cfg).map_err(AppError::Config)?;
            experiments::bler_csv(&cfg).map_err(AppError::Runtime)?
        }
        Command::Mi => {
            experiments::validate_mi(&cfg).map_err(AppError::Config)?;
            experiments::mi_csv(&cfg).map_err(AppError::Runtime)?
        }
        Command::Threshold => {
            experiments::validate_threshold(&cfg).map_err(AppError::Config)?;
            experiments::threshold_csv(&cfg).map_err(AppError::Runtime)?
        }
        Command::Endo => {
            experiments::validate_endo(&cfg).map_err(AppError::Config)?;
            experiments::endo_csv(&cfg).map_err(AppError::Runtime)?
        }
        Command::Encode => experiments::encode_csv(&cfg).map_err(AppError::Config)?,
        Command::Decode => experiments::decode_csv(&cfg).map_err(AppError::Config)?,
        Command::Config => cfg.to_text(),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, table)
            .map_err(|e| AppError::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{table}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

//! `classfield`: batch runs of the engine over JSON inputs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use commands::{render_text, run_cft, run_group, run_hrv, run_mackey, CliError, Outcome};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "classfield", version, about = "Finite-group reciprocity and higher-rank valuation checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Recompute all certificates, forcing reciprocity maps past failed validation.
    #[arg(long, global = true)]
    certify: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Order, subgroup lattice summary, abelianization and transfer tables.
    Group,
    /// RIC-functor axioms, stability, Mackey formula and cohomologicality.
    Mackey,
    /// Fesenko–Neukirch validation, reciprocity tables and reduction checks for a scenario.
    Cft,
    /// Rank-n valuations, projections, roundtrips and axiom sampling.
    Hrv,
}

fn load<T: DeserializeOwned>(path: &Option<PathBuf>) -> Result<T, CliError> {
    let path = path.as_ref().ok_or_else(|| CliError::Invalid("--input is required".into()))?;
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Group => run_group(&load(&cli.input)?),
        Command::Mackey => run_mackey(&load(&cli.input)?),
        Command::Cft => run_cft(&load(&cli.input)?, cli.certify),
        Command::Hrv => run_hrv(&load(&cli.input)?, cli.seed),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), CliError> {
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&outcome.value)? + "\n",
        Format::Text => render_text(&outcome.value),
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|source| CliError::Write { path: path.display().to_string(), source })
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|o| emit(&cli, &o).map(|_| o.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

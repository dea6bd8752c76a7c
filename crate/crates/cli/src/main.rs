//! `twophase`: run, validate and sweep two-layer interface scenarios.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error
//! (nothing written), 3 numerical halt (partial artifacts written).

mod report;
mod run;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use run::Outcome;
use scenario::{ConfigError, Scenario};

#[derive(Parser)]
#[command(name = "twophase", version, about = "Two-layer interface scenarios: diagnostics, simulations, sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write diagnostics.csv, monitors.json, report.txt.
    Run { config: PathBuf },
    /// Print the scenario with every default filled in, plus derived quantities.
    Validate { config: PathBuf },
    /// Run every scenario matching a glob pattern in parallel.
    Sweep { pattern: String },
}

fn run_one(path: &Path) -> Outcome {
    let s = match Scenario::load(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Outcome::ConfigError;
        }
    };
    match run::run(&s) {
        Ok(o) => {
            println!("{}: {} -> {}", path.display(), outcome_word(o), s.output_dir().display());
            o
        }
        Err(e) if e.is::<ConfigError>() => {
            eprintln!("error: {}: {e}", path.display());
            Outcome::ConfigError
        }
        Err(e) => {
            eprintln!("error: {}: {e:#}", path.display());
            Outcome::Halted
        }
    }
}

fn outcome_word(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "PASS",
        Outcome::Fail => "FAIL",
        Outcome::ConfigError => "CONFIG ERROR",
        Outcome::Halted => "HALTED",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config } => run_one(&config).code(),
        Command::Validate { config } => match Scenario::load(&config).and_then(|s| run::validate_echo(&s)) {
            Ok(text) => {
                print!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                Outcome::ConfigError.code()
            }
        },
        Command::Sweep { pattern } => {
            let paths: Vec<PathBuf> = match glob::glob(&pattern) {
                Ok(it) => it.filter_map(Result::ok).collect(),
                Err(e) => {
                    eprintln!("error: bad pattern {pattern:?}: {e}");
                    return ExitCode::from(2);
                }
            };
            if paths.is_empty() {
                eprintln!("error: no scenario matches {pattern:?}");
                2
            } else {
                // Worst outcome wins: the largest exit code across scenarios.
                paths.par_iter().map(|p| run_one(p).code()).max().unwrap_or(0)
            }
        }
    };
    ExitCode::from(code as u8)
}

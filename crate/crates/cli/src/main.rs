//! `ips-zeta`: build models, compute traces and zeta series, check closed
//! forms and evolve states from the command line.
//!
//! Complex numbers are written `re+imj` on the command line and `[re, im]`
//! in JSON. Angles may be radians or fractions of pi such as `pi/6`.
//!
//! Exit codes: 0 success, 1 runtime error, 2 invalid input, 3 a verification
//! check failed.

mod commands;
mod config;
mod error;
mod parse;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{EvolveArgs, KindArg, Output};
use config::{GlobalArgs, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ips-zeta", version, about = "Zeta functions and dynamics of two-state cellular automata on a path")]
#[command(after_help = "Complex numbers: `re+imj` (e.g. 0.1-0.4j). Angles: radians or `pi/6`, `3pi/4`.\n\
Exit codes: 0 ok, 1 runtime error, 2 invalid input, 3 verification failed.")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the local operator and report whether it is a PCA, QCA, CA or tensor model
    Validate,
    /// Trace table, C_r and log-zeta series; with --u, series and spectral values side by side
    Zeta,
    /// Run a closed-form check (or `all`) and print its report
    Verify {
        /// Formula id, e.g. chebyshev, rule90-conjecture; `all` runs every one
        formula: String,
    },
    /// Evolve a basis configuration and print site marginals per step
    Evolve {
        /// Initial configuration, e.g. 001 or 0,0,1
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Probability or amplitude evolution; inferred from the model if omitted
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Include full state vectors in JSON output
        #[arg(long)]
        full: bool,
    },
    /// Eigenvalues of the global operator
    Spectrum,
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let cfg = RunConfig::resolve(&cli.global)?;
    let out = match &cli.command {
        Command::Validate => commands::validate(&cfg)?,
        Command::Zeta => commands::zeta(&cfg)?,
        Command::Verify { formula } => commands::verify(&cfg, formula)?,
        Command::Evolve { init, steps, kind, full } => {
            commands::evolve(&cfg, &EvolveArgs { init, steps: *steps, kind: *kind, full: *full })?
        }
        Command::Spectrum => commands::spectrum(&cfg)?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, &out.text)?,
        None => std::io::stdout().write_all(out.text.as_bytes())?,
    }
    Ok(out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => ExitCode::from(out.code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

//! `geolab`: enumeration, periods, bridge residuals, graph statistics,
//! distribution reports and the acceptance suite from the command line.
//!
//! Exit status: 0 on success, 1 when a check fails or a computation errors,
//! 2 on a usage error.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use commands::{DistributionKind, PeriodKind};
use config::{Flags, RunConfig};
use std::process::ExitCode;
use thiserror::Error;

/// Errors surfaced by the command-line tool.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    MissingCache(String),
    #[error(transparent)]
    Library(#[from] geolab::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "geolab", version, about = "Geodesic and vertical periods on the modular surface")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate cosets, classes and edges of G_N into the cache.
    Enumerate,
    /// Geodesic periods per class or vertical periods per coset of the cached G_N.
    Periods {
        #[arg(long, value_enum, default_value = "geodesic")]
        kind: PeriodKind,
    },
    /// Residual table of geodesic against vertical periods over sampled edges.
    Bridge {
        #[arg(long, default_value_t = 500)]
        sample: usize,
    },
    /// Degree law, sandwich inequality and degree against strip length.
    GraphStats {
        /// Height T of the strip T <= y <= 2T (at least 1).
        #[arg(long, default_value_t = 1.0)]
        strip_height: f64,
    },
    /// Empirical laws of vertical or graph-weighted geodesic periods.
    Distribution {
        #[arg(long, value_enum, default_value = "vertical")]
        kind: DistributionKind,
        /// Cosets sampled for the vertical law.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Small-period counts over a ladder of N.
    Census {
        /// Comma-separated ladder (default N/8, N/4, N/2, N).
        #[arg(long, value_delimiter = ',')]
        ladder: Vec<i64>,
        /// Comma-separated threshold exponents.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25")]
        deltas: Vec<f64>,
    },
    /// Plancherel reports over narrow class groups with unit at most the bound.
    Waldspurger {
        #[arg(long, default_value_t = 50.0)]
        unit_bound: f64,
    },
    /// Run the acceptance suite (scales capped at --N when given).
    Verify {
        #[arg(long, default_value = "primary")]
        suite: String,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(&cli.flags)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let outcome = match &cli.command {
        Command::Enumerate => commands::enumerate(&cfg)?,
        Command::Periods { kind } => commands::periods(&cfg, *kind)?,
        Command::Bridge { sample } => commands::bridge(&cfg, *sample)?,
        Command::GraphStats { strip_height } => commands::graph_stats(&cfg, *strip_height)?,
        Command::Distribution { kind, samples } => commands::distribution(&cfg, *kind, *samples)?,
        Command::Census { ladder, deltas } => commands::census(&cfg, ladder, deltas)?,
        Command::Waldspurger { unit_bound } => commands::waldspurger(&cfg, *unit_bound)?,
        Command::Verify { suite } => {
            if suite != "primary" {
                return Err(CliError::Usage(format!("unknown suite {suite:?} (only \"primary\")")));
            }
            commands::verify(&cfg)?
        }
    };
    match outcome.report.emit(&cfg) {
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        r => r?,
    }
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("geolab: a check failed");
            ExitCode::from(1)
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("geolab: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("geolab: {e}");
            ExitCode::from(1)
        }
    }
}

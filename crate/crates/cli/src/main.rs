//! `nhwind`: plot-ready CSV/JSON for band braiding, winding numbers and
//! finite-chain spectra.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use nhwind::Error;

use config::{Cli, RunConfig};

const EXIT_IO: u8 = 1;
const EXIT_INPUT: u8 = 2;

/// Distinct exit status per failure class.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => EXIT_INPUT,
        Error::GaugeSingular { .. } | Error::TransposeGauge { .. } => 3,
        Error::AmbiguousTracking { .. } => 4,
        Error::NoClosure { .. } => 5,
        Error::SolverFailure { .. } | Error::MatchFailure { .. } => 6,
        Error::Defective { .. } => 7,
        Error::NotFourPiLoop => 8,
    }
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_from(Cli::parse()) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let artifact = match commands::run(&cfg) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = output::emit(&artifact.render(cfg.format), cfg.out.as_deref()) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(EXIT_IO);
    }
    ExitCode::SUCCESS
}

//! `spacelike`: curvature fields, PDE checks, surfaces and Möbius experiments
//! for minimal space-like surfaces in ℝ⁴₁.
//!
//! Exit codes: 0 success, 2 input error, 3 numeric or domain failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{CommonArgs, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "spacelike", version, about = "Explicit (K, kappa) solutions for minimal space-like surfaces in R^4_1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample alpha, K and kappa on a grid
    Curvature {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Finite-difference residuals of the natural equations in all three forms
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of grids, each halving the spacing of the previous one
        #[arg(long)]
        refine: Option<usize>,
        /// Check a K/kappa CSV instead of a generator
        #[arg(long)]
        from_field: Option<PathBuf>,
    },
    /// Integrate the surface and export OBJ plus a per-vertex CSV
    Surface {
        #[command(flatten)]
        common: CommonArgs,
        /// Ambient axes written to the OBJ, e.g. 1,2,4
        #[arg(long)]
        proj: Option<String>,
    },
    /// Apply a fractional-linear transformation to a g-pair
    Transform {
        #[command(flatten)]
        common: CommonArgs,
        /// {"a":[re,im],"b":..,"c":..,"d":..} or a path to such a file; random from --seed if absent
        #[arg(long)]
        params: Option<String>,
    },
    /// Decide whether two pairs give the same (K, kappa)
    Equiv {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        other_f1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        other_f2: Option<String>,
        /// Compare against the transform of the first pair by these params
        #[arg(long)]
        params: Option<String>,
        /// Relative tolerance on alpha
        #[arg(long)]
        rel_tol: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Curvature { common } => commands::curvature(&RunConfig::resolve(&common)?),
        Command::Verify { common, refine, from_field } => {
            commands::verify(&RunConfig::resolve(&common)?, refine, from_field.as_deref())
        }
        Command::Surface { common, proj } => commands::surface(&RunConfig::resolve(&common)?, proj.as_deref()),
        Command::Transform { common, params } => {
            commands::transform_cmd(&RunConfig::resolve(&common)?, params.as_deref())
        }
        Command::Equiv { common, other_f1, other_f2, params, rel_tol } => commands::equiv(
            &RunConfig::resolve(&common)?,
            (other_f1.as_deref(), other_f2.as_deref()),
            params.as_deref(),
            rel_tol,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (CliError::Input(m) | CliError::Numeric(m)) = &e;
            eprintln!("error: {m}");
            ExitCode::from(e.code())
        }
    }
}

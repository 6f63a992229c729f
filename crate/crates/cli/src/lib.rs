//! `floquet`: analyse periodic linear systems, probe forced responses and verify the dichotomy theorems.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
pub mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floquet_core::propagator::Method;
use floquet_core::system::Side;
use floquet_harness::DEFAULT_SEED;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] floquet_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// Which projection `P` drives the forced problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProjectionChoice {
    /// Dichotomy projection, or the non-expanding projection when eigenvalues sit on the unit circle.
    Spectral,
    Identity,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideChoice {
    Forward,
    Adjoint,
    Both,
}

impl SideChoice {
    fn sides(self) -> Vec<Side> {
        match self {
            SideChoice::Forward => vec![Side::Forward],
            SideChoice::Adjoint => vec![Side::Adjoint],
            SideChoice::Both => vec![Side::Forward, Side::Adjoint],
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "floquet",
    version,
    about = "Dichotomy and forced-response analysis of periodic linear systems"
)]
pub struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Directory for report.json, traces/ and plots/ (created if absent)
    #[arg(long, global = true, env = "FLOQUET_OUT_DIR", default_value = "floquet-out")]
    out_dir: PathBuf,
    /// rk4 or dopri5
    #[arg(long, global = true, default_value = "rk4")]
    integrator: Method,
    /// RK4 step (default q/2000)
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Width of the unit-circle band used for classification
    #[arg(long, global = true, default_value_t = floquet_core::spectral::DEFAULT_CIRCLE_TOL)]
    circle_tol: f64,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Artifacts to write
    #[arg(long, global = true, value_enum, value_delimiter = ',', default_values_t = [Format::Json, Format::Csv, Format::Svg])]
    format: Vec<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monodromy, spectrum, classification and projection
    Analyze {
        /// Built-in name or path to a TOML system file
        system: String,
    },
    /// Integrate one forced problem and export the trace
    Simulate {
        system: String,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        /// Comma-separated complex entries, e.g. `1,0.5-2i`
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long)]
        side: Option<Side>,
        #[arg(long, default_value_t = 10)]
        periods: usize,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = ProjectionChoice::Spectral)]
        projection: ProjectionChoice,
    },
    /// Boundedness verdict for one forcing over many periods
    Probe {
        system: String,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long)]
        side: Option<Side>,
        /// Horizon in periods (default: 100, doubled up to 400 while inconclusive)
        #[arg(long)]
        periods: Option<usize>,
        #[arg(long, value_enum, default_value_t = ProjectionChoice::Spectral)]
        projection: ProjectionChoice,
    },
    /// Boundedness probes over a frequency grid
    Sweep {
        system: String,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, default_value_t = 64)]
        grid_points: usize,
        #[arg(long)]
        periods: Option<usize>,
        #[arg(long, value_enum, default_value_t = SideChoice::Both)]
        side: SideChoice,
        #[arg(long, value_enum, default_value_t = ProjectionChoice::Spectral)]
        projection: ProjectionChoice,
    },
    /// Check theorem predictions on a system
    Verify {
        /// Built-in name or path to a TOML system file
        target: String,
        /// T3_2, T3_3, T3_5, T3_4_stability, Example3_6, T2_1_growth or `all`
        #[arg(default_value = "all")]
        theorem: String,
        #[arg(long)]
        periods: Option<usize>,
        #[arg(long, default_value_t = 64)]
        grid_points: usize,
    },
    /// Print the built-in systems
    ListExamples,
}

/// Parses `argv` (program name first), runs the command and returns the process exit code.
pub fn run<S: AsRef<str>>(argv: &[S]) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match commands::execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

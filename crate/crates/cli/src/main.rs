//! Command-line front end for the `ttesum` engine: model-spec ingestion,
//! convolution, prediction, simulation and estimation subcommands, CSV/JSON
//! emission, and a reproduce-example harness.
//!
//! Exit codes: 0 success, 1 check/validation failure, 2 numerical
//! non-convergence, 3 domain or usage error.

mod commands;
mod examples;
mod output;
mod spec;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use ttesum::Direction;

/// Errors carried to the process boundary; each maps to an exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable files, malformed input data. Exit 3.
    Usage(String),
    /// A model-spec file did not parse (message carries line/column).
    /// Exit 3; the `validate` subcommand reports this itself and exits 1.
    Spec(String),
    /// Engine failure: exit 2 for numerical breakdowns, 3 for domain errors.
    Engine(ttesum::Error),
    /// A requested check failed. Exit 1.
    Check(String),
}

impl From<ttesum::Error> for CliError {
    fn from(e: ttesum::Error) -> Self {
        CliError::Engine(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Spec(msg) => write!(f, "model spec: {msg}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Check(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Engine(e) => {
                if e.is_numeric() {
                    2
                } else {
                    3
                }
            }
            CliError::Usage(_) | CliError::Spec(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    /// The law of the sum S given the first component X1.
    SGivenX1,
    /// The law of the first component X1 given the sum S.
    X1GivenS,
}

impl DirectionArg {
    pub fn direction(self) -> Direction {
        match self {
            DirectionArg::SGivenX1 => Direction::SGivenX1,
            DirectionArg::X1GivenS => Direction::X1GivenS,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DirectionArg::SGivenX1 => "s-given-x1",
            DirectionArg::X1GivenS => "x1-given-s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BandKindArg {
    /// Equal-tail band between the (1-p)/2 and (1+p)/2 quantiles.
    Centered,
    /// One-sided band from the bottom of the support up to the p-quantile.
    Bottom,
}


#[derive(Debug, Parser)]
#[command(
    name = "ttesum",
    version,
    about = "Distribution of the sum of two dependent lifetimes under \
             time-transformed exponential models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model-spec file: generator admissibility and model consistency.
    Validate {
        /// Path to the model-spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        /// Emit the report as a JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Tabulate survival, density and hazard of the sum S = X1 + X2.
    Convolve {
        /// Path to the model-spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        /// Left end of the s-grid.
        #[arg(long, default_value_t = 0.0)]
        s_min: f64,
        /// Right end of the s-grid (default: the 0.99-quantile of S).
        #[arg(long)]
        s_max: Option<f64>,
        /// Number of grid points.
        #[arg(long, default_value_t = 200)]
        s_steps: usize,
        /// Emit JSON records (one per grid point) instead of CSV.
        #[arg(long)]
        json: bool,
        /// Write to DIR/convolve.csv (or .jsonl) instead of stdout.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Conditional median and prediction bands along a conditioning grid.
    Predict {
        /// Path to the model-spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        /// Which conditional law to evaluate.
        #[arg(long, value_enum)]
        direction: DirectionArg,
        /// Evaluate at a single conditioning value; prints one JSON record.
        #[arg(long)]
        at: Option<f64>,
        /// Extra quantile level to tabulate alongside the median.
        #[arg(long)]
        q: Option<f64>,
        /// Band construction; `bottom` appends the bottom-band columns.
        #[arg(long, value_enum, default_value_t = BandKindArg::Centered)]
        kind: BandKindArg,
        /// Number of conditioning grid points.
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Emit JSON records (one per grid point) instead of CSV.
        #[arg(long)]
        json: bool,
        /// Write to DIR/predict.csv (or .json/.jsonl) instead of stdout.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Draw a reproducible sample of (X1, X2, S).
    Simulate {
        /// Path to the model-spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        /// Number of draws.
        #[arg(long)]
        n: usize,
        /// Seed; overrides the spec file's seed (default 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Emit JSON records instead of CSV.
        #[arg(long)]
        json: bool,
        /// Write to DIR/simulate.csv (or .jsonl) instead of stdout.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Estimate (gamma, alpha, beta) from a simulate CSV; prints JSON.
    Fit {
        /// CSV produced by `simulate`; reads stdin when omitted.
        file: Option<PathBuf>,
        /// Accepted for symmetry; the output is always JSON.
        #[arg(long)]
        json: bool,
    },
    /// Regenerate the data files and checks for a worked example (1-4).
    ReproduceExample {
        /// Example number.
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        number: u8,
        /// Directory for the plot-data CSV files.
        #[arg(long, default_value = ".", value_name = "DIR")]
        out: PathBuf,
        /// Emit the report as a JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { spec, json } => commands::validate(&spec, json),
        Command::Convolve {
            spec,
            s_min,
            s_max,
            s_steps,
            json,
            out,
        } => commands::convolve(&spec, s_min, s_max, s_steps, json, out.as_deref()),
        Command::Predict {
            spec,
            direction,
            at,
            q,
            kind,
            steps,
            json,
            out,
        } => commands::predict(&spec, direction, at, q, kind, steps, json, out.as_deref()),
        Command::Simulate {
            spec,
            n,
            seed,
            json,
            out,
        } => commands::simulate(&spec, n, seed, json, out.as_deref()),
        Command::Fit { file, json } => commands::fit(file.as_deref(), json),
        Command::ReproduceExample { number, out, json } => examples::reproduce(number, &out, json),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(3);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

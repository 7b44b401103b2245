use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use conformal_exact::Shape;

use crate::report::Format;

/// Environment variable supplying the seed when `--seed` is absent.
pub const SEED_ENV: &str = "CONFORMAL_SEED";

#[derive(Debug, Parser)]
#[command(name = "conformal", version, about = "Exact conformal prediction regions, oracle checks and coverage simulations")]
pub struct Cli {
    /// Seed for randomised commands; falls back to $CONFORMAL_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Miscoverage level in (0, 1).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form prediction region for the dataset's prediction row.
    Predict(PredictArgs),
    /// Brute-force region for a named measure, compared with its closed form when one exists.
    Oracle(OracleArgs),
    /// Run the counterexample question suite.
    Counterexamples(CounterexampleArgs),
    /// Run a coverage simulation from a TOML config.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// CSV with header x1,..,xp,y; a last row with empty y is the point to predict.
    pub dataset: PathBuf,

    #[arg(long, default_value = "upper")]
    pub shape: Shape,

    /// Bounded supervised shape only; defaults to the data-driven choice.
    #[arg(long)]
    pub eta: Option<f64>,

    /// Bounded unsupervised shape only; required there.
    #[arg(long)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub scan_lower: Option<f64>,
    #[arg(long)]
    pub scan_upper: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Bisection tolerance for region endpoints.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub dataset: PathBuf,

    /// poly-sup, poly-unsup or a catalog id (ce1, ce2, ce4, ce5, ce1u, ce2u, ce4u, ce5u).
    #[arg(long)]
    pub measure: String,

    /// Shape of the polynomial measures.
    #[arg(long, default_value = "upper")]
    pub shape: Shape,

    #[arg(long)]
    pub eta: Option<f64>,

    #[arg(long)]
    pub kappa: Option<f64>,

    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML file with the fields of a simulation config.
    pub config: PathBuf,

    /// Compare against the bundled published targets.
    #[arg(long)]
    pub check: bool,
}

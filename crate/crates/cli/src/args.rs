use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const PRESETS: &str = "scenario presets (--scenario x --sampling):
  s1 x equidistant|hitting   no noise
  s2 x equidistant|hitting   i.i.d. Gaussian noise, variance 0.001 sigma^2
  s3 x equidistant|hitting   endogenous noise -sqrt(0.001) sqrt(n) dX
all presets: sigma=0.02, X1=sigma/2, n=3600, theta=0.15, hitting u=0.01 v=0.04";

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ENDOPHY_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "endophy", version, about = "Pre-averaged Hayashi-Yoshida laboratory", after_help = PRESETS)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the latent bridge paths.
    Simulate(Common),
    /// Simulate paths and sampling times, with the refresh-time design.
    Sample(Common),
    /// Simulate noisy observations.
    Observe(Common),
    /// Point estimates on simulated or supplied observations.
    Estimate(DataArgs),
    /// Feasible asymptotic-variance estimate of the PHY.
    Avar(DataArgs),
    /// Replicated experiment with summary tables.
    Mc(Common),
    /// Kernel constants of a weight function.
    Constants(ConstantsArgs),
    /// Empirical duration diagnostics against the closed-form limits.
    Diag(DiagArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML file with scenario keys; flags and --set override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $ENDOPHY_OUT_DIR or ./endophy_out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for replications (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Scenario preset: s1, s2, s3 or custom.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Sampling preset: equidistant or hitting.
    #[arg(long)]
    pub sampling: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Nominal frequency n (b_n = 1/n).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Any config key, e.g. `--set model.sigma=0.03`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[command(flatten)]
    pub common: Common,
    /// Observation CSV (columns time, value) for the first asset.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Observation CSV for the second asset; defaults to the first.
    #[arg(long)]
    pub input_y: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Pre-averaging weight g.
    #[arg(long, default_value = "min_xx")]
    pub weight: String,
    /// Auxiliary weight f with flat ends.
    #[arg(long, default_value = "quartic_f")]
    pub aux: String,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Equidistant,
    Hitting,
    LoMackinlay,
    Poisson,
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_enum)]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0.01)]
    pub u: f64,
    #[arg(long, default_value_t = 0.04)]
    pub v: f64,
    #[arg(long, default_value_t = 1.0 / 3600.0)]
    pub bn: f64,
    #[arg(long, default_value_t = 0.02)]
    pub sigma: f64,
    /// Non-trading probability (Lo-MacKinlay) or rate before the change
    /// point (Poisson) of the first asset.
    #[arg(long, default_value_t = 0.5)]
    pub p1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p2: f64,
    /// Minimum number of pooled refresh durations.
    #[arg(long, default_value_t = 10_000)]
    pub durations: usize,
}

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Hyperbolic wavelet and Littlewood-Paley norms on periodic dyadic grids.
#[derive(Debug, Parser)]
#[command(name = "hypwave", version, about)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "HYPWAVE_THREADS")]
    pub threads: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a test field and write it as `.grd`.
    Synth(SynthArgs),
    /// Forward or inverse hyperbolic wavelet transform.
    Transform(TransformArgs),
    /// Function-space norm of a `.grd` field.
    Norm(NormArgs),
    /// Sequence-space norm of a `.hwc` coefficient file.
    Seqnorm(SeqnormArgs),
    /// Estimate smoothness and anisotropy from wavelet coefficients.
    Detect(DetectArgs),
    /// Run a named experiment.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Cascade,
    Lacunary,
    Disjoint,
    Kernel,
    Bandlimited,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Profile {
    Flat,
    Decay,
    Dc,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long = "J", short = 'J')]
    pub level: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Comma-separated anisotropy, summing to d (default isotropic).
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Family size `N` for the one-dimensional families.
    #[arg(long)]
    pub n: Option<usize>,
    /// Random signs for cascades.
    #[arg(long)]
    pub rademacher: bool,
    /// Haar building blocks for the lacunary family (default: tones).
    #[arg(long)]
    pub haar: bool,
    #[arg(long, default_value = "haar")]
    pub wavelet: String,
    /// Spectral radius for band-limited fields.
    #[arg(long, default_value_t = 8)]
    pub cap: i64,
    #[arg(long, value_enum, default_value = "decay")]
    pub profile: Profile,
    #[arg(long, default_value_t = 1.0)]
    pub decay: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, default_value = "haar")]
    pub wavelet: String,
    /// Read a `.hwc` file and synthesize a `.grd` field.
    #[arg(long)]
    pub inverse: bool,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    #[value(name = "B")]
    B,
    #[value(name = "F")]
    F,
    #[value(name = "W")]
    W,
    #[value(name = "Bt")]
    Bt,
    #[value(name = "Ft")]
    Ft,
    #[value(name = "Wt")]
    Wt,
    #[value(name = "SrB")]
    SrB,
    #[value(name = "SrF")]
    SrF,
    #[value(name = "SrW")]
    SrW,
    #[value(name = "L2")]
    L2,
    #[value(name = "Lp")]
    Lp,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long, value_enum)]
    pub space: Space,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
    /// Mixed smoothness for the Sr spaces.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeqSpace {
    Bt,
    Ft,
}

#[derive(Debug, Args)]
pub struct SeqnormArgs {
    #[arg(long, value_enum)]
    pub space: SeqSpace,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Fail with exit code 4 when the basis does not characterize the space.
    #[arg(long)]
    pub strict: bool,
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// `.hwc` coefficients, or a `.grd` field transformed with `--wavelet`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "haar")]
    pub wavelet: String,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha_step: f64,
    #[arg(long, default_value_t = 2)]
    pub j_min: usize,
    #[arg(long)]
    pub j_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment name; optional when the config file names one.
    pub name: Option<String>,
    /// TOML file with an `experiment` key and parameter overrides.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hypwave: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SIGMAS: &str = "0.5,0.7,0.9,0.95,0.99";

#[derive(Debug, Parser)]
#[command(
    name = "fraclen",
    version,
    about = "Fractional length and nonlocal curvature of curves in R^n"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate Len_sigma of a curve inside a ball window.
    Length(LengthArgs),
    /// Estimate (1 - sigma) Len_sigma over a sigma grid and extrapolate to sigma = 1.
    LimitSweep(LimitSweepArgs),
    /// Estimate the nonlocal curvature vector at a curve point.
    Curvature(CurvatureArgs),
    /// Estimate the Euler-Lagrange residual at a curve point.
    ElResidual(CurvatureArgs),
    /// Classify one disc against a curve.
    Classify(ClassifyArgs),
    /// Compare finite-difference Jacobians of the disc parametrizations with closed forms.
    VerifyJacobians(VerifyJacobiansArgs),
    /// Estimate the integral of |b.c| over orthonormal pairs.
    VerifyLemmaInt(VerifyLemmaIntArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Master seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV output file; a `.meta` file is written next to it. Defaults to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    /// Hyperplane root tolerance, relative to the curve scale.
    #[arg(long)]
    pub tol_plane: Option<f64>,
    /// Disc-rim tolerance, relative to the curve scale.
    #[arg(long)]
    pub tol_radius: Option<f64>,
    /// Tangency tolerance on |t.u|.
    #[arg(long)]
    pub tol_tangent: Option<f64>,
    /// Grid intervals for the root scan.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Window ball radius.
    #[arg(long, default_value_t = 2.0)]
    pub window_radius: f64,
    /// Window ball center, comma separated. Defaults to the curve centroid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub window_center: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum UnbiasingArg {
    Canonical,
    Multiplicity,
}

#[derive(Debug, Args)]
pub struct LengthArgs {
    /// Curve spec file, or a bundled name: segment, circle, helix, fourier4.
    #[arg(long)]
    pub curve: String,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = UnbiasingArg::Canonical)]
    pub unbiasing: UnbiasingArg,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct LimitSweepArgs {
    /// Curve spec file, or a bundled name: segment, circle, helix, fourier4.
    #[arg(long)]
    pub curve: String,
    /// Increasing sigma values, comma separated.
    #[arg(long, value_delimiter = ',', default_value = DEFAULT_SIGMAS)]
    pub sigmas: Vec<f64>,
    /// Samples per sigma.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = UnbiasingArg::Canonical)]
    pub unbiasing: UnbiasingArg,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    /// Curve spec file, or a bundled name: segment, circle, helix, fourier4.
    #[arg(long)]
    pub curve: String,
    /// Curve parameter of the point.
    #[arg(long, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long)]
    pub sigma: f64,
    /// Smallest radius (default 1e-3 x curve scale).
    #[arg(long)]
    pub r_min: Option<f64>,
    /// Largest radius (default 2 x bounding radius + curve scale).
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Curve spec file, or a bundled name: segment, circle, helix, fourier4.
    #[arg(long)]
    pub curve: String,
    /// Disc center, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub center: Vec<f64>,
    /// Disc normal, comma separated (normalized on input).
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub normal: Vec<f64>,
    #[arg(long)]
    pub radius: f64,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct VerifyJacobiansArgs {
    /// Curve spec file or bundled name. Defaults to helix for n = 3 and fourier4 for n = 4.
    #[arg(long)]
    pub curve: Option<String>,
    /// Ambient dimension when no curve is given.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Random points per map.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    /// Smallest |b.t| (or |(a.t, b.t)| for psi) at a test point.
    #[arg(long, default_value_t = 1e-3)]
    pub min_projection: f64,
    /// Relative error threshold for the pass counts.
    #[arg(long, default_value_t = 1e-5)]
    pub threshold: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct VerifyLemmaIntArgs {
    /// Ambient dimension (at least 3).
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Fixed direction c, comma separated. Defaults to the first basis vector.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub direction: Option<Vec<f64>>,
    #[command(flatten)]
    pub run: RunArgs,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "capquad", version, about = "Positive cubature and sampling inequalities on spherical caps")]
pub struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, env = "CAPQUAD_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a maximal (δ/n)-separable node set.
    Points(PointsArgs),
    /// Solve for positive weights exact to the given degree.
    Solve(SolveArgs),
    /// Measure the constant of one inequality.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Print the moments of the orthonormal basis over a cap or collar.
    Moments(MomentsArgs),
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// Sphere dimension (1 or 2).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Cap radius, or inner radius of a collar.
    #[arg(long)]
    pub alpha: f64,
    /// Outer radius; turns the cap into a collar.
    #[arg(long)]
    pub collar_beta: Option<f64>,
    /// Centre as comma-separated coordinates (default: north pole).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub center: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long)]
    pub degree: usize,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, env = "CAPQUAD_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub points: PathBuf,
    /// Exactness degree (default: the degree the nodes were built for).
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, default_value_t = capquad_core::cubature::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long)]
    pub degree: usize,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, env = "CAPQUAD_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Report destination (default: standard output).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also export the report cells as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Enforce the acceptance thresholds; exit 3 on violation.
    #[arg(long)]
    pub assert: bool,
    /// Store the wall time in the report.
    #[arg(long)]
    pub record_time: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Rule file with weights.
    #[arg(long)]
    pub rule: Option<PathBuf>,
    /// Node file (weights ignored).
    #[arg(long)]
    pub points: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightKind {
    Constant,
    BoundaryPower,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    #[arg(long, value_enum, default_value_t = WeightKind::Constant)]
    pub weight: WeightKind,
    /// Exponent of the boundary-power weight.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Reference degree of the boundary-power weight.
    #[arg(long, default_value_t = capquad_core::mz::DEFAULT_N_REF)]
    pub n_ref: f64,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = capquad_core::mz::DEFAULT_BALL_SAMPLES)]
    pub ball_samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum VerifyKind {
    /// Cubature sums of |f|^p against the integral.
    Mz {
        #[command(flatten)]
        input: Input,
        /// Degree of the test polynomials (default: the rule degree).
        #[arg(long)]
        poly_degree: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Oscillation of polynomials over small balls.
    Osc {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        degree: Option<usize>,
        #[command(flatten)]
        ball: BallArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Large-sieve bound for an arbitrary node set.
    Sieve {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        degree: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Ball maximum and minimum sums.
    Maxmin {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        degree: Option<usize>,
        #[command(flatten)]
        ball: BallArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted Bernstein ratio on an arc of the circle.
    Bernstein {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted equivalences with a doubling weight.
    WeightedMz {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        degree: Option<usize>,
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        ball: BallArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Covering multiplicity of the enlarged balls.
    Cov {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = capquad_core::point_sets::DEFAULT_PROBE_RESOLUTION)]
        probes: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Change of variables under the polar dilation.
    ChangeOfVar {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 8)]
        degree: usize,
        #[command(flatten)]
        common: Common,
    },
}

//! Command-line definition.
//!
//! Every subcommand shares one flag set; flags left unset fall back to the
//! config file (`--config`), then to the subcommand's defaults.

use std::path::PathBuf;

use cheby_core::problems::ShrinkVariant;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_t_list, Experiment, Overrides};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "cheby", version, about = "Chebyshev inertial iteration experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate rate bounds for a manual range [defaults: T=2,4,6, a=0.1, b=0.9].
    Bounds(CommonArgs),
    /// Jacobi iteration on random SPD systems [defaults: n=64, T=1,8, seeds=1, iters=100, range=analytic].
    Jacobi(CommonArgs),
    /// Small nonlinear maps.
    Toy {
        /// power: 2-D fractional-power map [iters=200]; tanh-solve: x ↦ y − tanh x
        /// [iters=100]; tanh-gram: x ↦ tanh(Ax) [n=128, T=2,4,8, iters=400].
        #[arg(long, value_enum)]
        problem: ToyProblem,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sparse recovery by ISTA, Chebyshev-ISTA and FISTA
    /// [defaults: n=256, m=128, T=8, seeds=100, iters=1500, range=pilot, threshold=1e-2].
    Ista(CommonArgs),
    /// Richardson deblurring of 28×28 images
    /// [defaults: n=28, T=8, seeds=10, iters=128, a=0.18, b=0.98, omega=0.8, threshold=1e-4].
    Deblur(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToyProblem {
    Power,
    TanhSolve,
    TanhGram,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Config file of `key = value` lines; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Problem dimension (image side for deblur).
    #[arg(long)]
    pub n: Option<usize>,
    /// Measurement count (ista).
    #[arg(long)]
    pub m: Option<usize>,
    /// Comma-separated Chebyshev periods, e.g. `2,4,8`.
    #[arg(long = "T", value_name = "LIST")]
    pub t_list: Option<String>,
    /// Number of random instances.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Base seed [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Iterations per solver.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Manual lower end of the eigen range of B (with --b).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Manual upper end of the eigen range of B (with --a).
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Output directory for CSV files and images.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Range policy: analytic | pilot | manual.
    #[arg(long)]
    pub range: Option<String>,
    /// Nonzero probability of the sparse source [default: 0.1].
    #[arg(long)]
    pub p: Option<f64>,
    /// Measurement noise std [default: 0.1].
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Entry std of random matrices [default: scaled with n].
    #[arg(long)]
    pub std: Option<f64>,
    /// Softplus sharpness of the smooth shrinkage [default: 100].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Smooth-shrinkage variant: signed | printed [default: signed].
    #[arg(long)]
    pub shrink: Option<ShrinkVariant>,
    /// Richardson step size [default: 0.8].
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Error threshold for iters_to_threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Run seeds in parallel (results are identical to sequential runs).
    #[arg(long)]
    pub parallel: bool,
    /// Input PGM image for deblur (replaces the synthetic digits).
    #[arg(long)]
    pub image: Option<PathBuf>,
}

impl CommonArgs {
    /// Command-line values as overrides (without the config file).
    pub fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            experiment: None,
            n: self.n,
            m: self.m,
            t_list: self.t_list.as_deref().map(parse_t_list).transpose()?,
            seeds: self.seeds,
            seed: self.seed,
            iters: self.iters,
            a: self.a,
            b: self.b,
            range: self.range.clone(),
            out: self.out.clone(),
            p: self.p,
            sigma: self.sigma,
            std: self.std,
            beta: self.beta,
            shrink: self.shrink,
            omega: self.omega,
            target_lambda: None,
            threshold: self.threshold,
            parallel: self.parallel.then_some(true),
            image: self.image.clone(),
        })
    }
}

impl Command {
    pub fn split(&self) -> (Experiment, &CommonArgs) {
        match self {
            Command::Bounds(c) => (Experiment::Bounds, c),
            Command::Jacobi(c) => (Experiment::Jacobi, c),
            Command::Toy { problem, common } => (
                match problem {
                    ToyProblem::Power => Experiment::ToyPower,
                    ToyProblem::TanhSolve => Experiment::TanhSolve,
                    ToyProblem::TanhGram => Experiment::TanhGram,
                },
                common,
            ),
            Command::Ista(c) => (Experiment::Ista, c),
            Command::Deblur(c) => (Experiment::Deblur, c),
        }
    }
}

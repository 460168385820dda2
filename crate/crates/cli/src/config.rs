//! Experiment configuration: per-experiment defaults, flat `key = value`
//! files, and command-line overrides (flags win over file values).

use std::fmt;
use std::path::{Path, PathBuf};

use cheby_core::problems::ShrinkVariant;
use cheby_core::EigenRange;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Bounds,
    Jacobi,
    ToyPower,
    TanhSolve,
    TanhGram,
    Ista,
    Deblur,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Bounds => "bounds",
            Experiment::Jacobi => "jacobi",
            Experiment::ToyPower => "toy_power",
            Experiment::TanhSolve => "tanh_solve",
            Experiment::TanhGram => "tanh_gram",
            Experiment::Ista => "ista",
            Experiment::Deblur => "deblur",
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bounds" => Experiment::Bounds,
            "jacobi" => Experiment::Jacobi,
            "toy_power" | "power" => Experiment::ToyPower,
            "tanh_solve" | "tanh-solve" => Experiment::TanhSolve,
            "tanh_gram" | "tanh-gram" => Experiment::TanhGram,
            "ista" => Experiment::Ista,
            "deblur" => Experiment::Deblur,
            other => return Err(CliError::Config(format!("unknown experiment `{other}`"))),
        })
    }
}

/// Where the eigenvalue range `[a, b]` of `B = I − J*` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangePolicy {
    /// Dense spectrum of `B` at the known fixed point.
    Analytic,
    /// Spectrum at the end of a plain pilot run.
    Pilot,
    Manual { a: f64, b: f64 },
}

impl RangePolicy {
    pub fn label(&self) -> &'static str {
        match self {
            RangePolicy::Analytic => "analytic",
            RangePolicy::Pilot => "pilot",
            RangePolicy::Manual { .. } => "manual",
        }
    }
}

/// Fully resolved settings for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Problem dimension (image side length for `deblur`).
    pub n: usize,
    /// Number of measurements (`ista`).
    pub m: usize,
    pub t_list: Vec<usize>,
    pub seeds: usize,
    pub base_seed: u64,
    pub iters: usize,
    pub range_policy: RangePolicy,
    pub output_dir: Option<PathBuf>,
    /// Source sparsity (`ista`).
    pub p: f64,
    /// Noise standard deviation (`ista`).
    pub sigma: f64,
    /// Matrix entry std (`jacobi`, `tanh_gram`); `None` rescales the
    /// reference value to the chosen `n`.
    pub std: Option<f64>,
    /// Softplus sharpness (`ista`).
    pub beta_sp: f64,
    pub shrink: ShrinkVariant,
    /// Richardson factor (`deblur`).
    pub omega_r: f64,
    /// Target `λ_max(J*)` after calibration (`tanh_gram`).
    pub target_lambda: f64,
    /// Error level reported as `iters_to_threshold`.
    pub threshold: f64,
    pub parallel: bool,
    /// Source image for `deblur` instead of synthetic digits.
    pub image: Option<PathBuf>,
}

/// Base seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;

impl ExperimentConfig {
    /// Desk-scale defaults.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut c = Self {
            experiment,
            n: 64,
            m: 0,
            t_list: vec![8],
            seeds: 1,
            base_seed: DEFAULT_SEED,
            iters: 100,
            range_policy: RangePolicy::Analytic,
            output_dir: None,
            p: 0.1,
            sigma: 0.1,
            std: None,
            beta_sp: 100.0,
            shrink: ShrinkVariant::SignCorrected,
            omega_r: 0.8,
            target_lambda: 0.97,
            threshold: 1e-10,
            parallel: false,
            image: None,
        };
        match experiment {
            Experiment::Bounds => {
                c.t_list = vec![2, 4, 6];
                c.range_policy = RangePolicy::Manual { a: 0.1, b: 0.9 };
            }
            Experiment::Jacobi => {
                c.t_list = vec![1, 8];
            }
            Experiment::ToyPower => {
                c.n = 2;
                c.iters = 200;
            }
            Experiment::TanhSolve => {
                c.n = 2;
                c.iters = 100;
            }
            Experiment::TanhGram => {
                c.n = 128;
                c.t_list = vec![2, 4, 8];
                c.iters = 400;
            }
            Experiment::Ista => {
                c.n = 256;
                c.m = 128;
                c.seeds = 100;
                c.iters = 1500;
                c.range_policy = RangePolicy::Pilot;
                c.threshold = 1e-2;
            }
            Experiment::Deblur => {
                c.n = 28;
                c.seeds = 10;
                c.iters = 128;
                c.range_policy = RangePolicy::Manual { a: 0.18, b: 0.98 };
                c.threshold = 1e-4;
            }
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.t_list.is_empty() {
            return bad("T list must not be empty".into());
        }
        if let Some(t) = self.t_list.iter().find(|&&t| t == 0) {
            return bad(format!("every period T must be at least 1, got {t}"));
        }
        if self.iters == 0 {
            return bad("iters must be at least 1".into());
        }
        if self.seeds == 0 && self.experiment != Experiment::Bounds {
            return bad("seeds must be at least 1".into());
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.experiment == Experiment::Ista && self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if matches!(self.experiment, Experiment::ToyPower | Experiment::TanhSolve) && self.n != 2 {
            return bad(format!("{} is two-dimensional; n must be 2", self.experiment.as_str()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p must lie in [0, 1], got {}", self.p));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be nonnegative, got {}", self.sigma));
        }
        if let Some(s) = self.std {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("std must be positive, got {s}"));
            }
        }
        if !(self.beta_sp > 0.0 && self.beta_sp.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta_sp));
        }
        if !(self.omega_r > 0.0 && self.omega_r.is_finite()) {
            return bad(format!("omega must be positive, got {}", self.omega_r));
        }
        if !(self.target_lambda > 0.0 && self.target_lambda < 1.0) {
            return bad(format!("target_lambda must lie in (0, 1), got {}", self.target_lambda));
        }
        if !(self.threshold >= 0.0) {
            return bad(format!("threshold must be nonnegative, got {}", self.threshold));
        }
        match self.range_policy {
            RangePolicy::Manual { a, b } => {
                EigenRange::new(a, b).map_err(|e| CliError::Config(e.to_string()))?;
            }
            RangePolicy::Analytic | RangePolicy::Pilot if self.experiment == Experiment::Bounds => {
                return bad("bounds needs a manual range (--a, --b)".into());
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for ExperimentConfig {
    /// Flat `key = value` rendering, readable back by [`Overrides::parse_file`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiment = {}", self.experiment.as_str())?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "m = {}", self.m)?;
        let ts: Vec<String> = self.t_list.iter().map(|t| t.to_string()).collect();
        writeln!(f, "T = {}", ts.join(","))?;
        writeln!(f, "seeds = {}", self.seeds)?;
        writeln!(f, "seed = {}", self.base_seed)?;
        writeln!(f, "iters = {}", self.iters)?;
        writeln!(f, "range = {}", self.range_policy.label())?;
        if let RangePolicy::Manual { a, b } = self.range_policy {
            writeln!(f, "a = {a}")?;
            writeln!(f, "b = {b}")?;
        }
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "sigma = {}", self.sigma)?;
        if let Some(s) = self.std {
            writeln!(f, "std = {s}")?;
        }
        writeln!(f, "beta = {}", self.beta_sp)?;
        writeln!(f, "shrink = {}", self.shrink.as_str())?;
        writeln!(f, "omega = {}", self.omega_r)?;
        writeln!(f, "target_lambda = {}", self.target_lambda)?;
        writeln!(f, "threshold = {}", self.threshold)?;
        if let Some(img) = &self.image {
            writeln!(f, "image = {}", img.display())?;
        }
        // `parallel` and `out` do not affect results and are omitted so that
        // the echo is identical across placements and thread counts.
        Ok(())
    }
}

/// Optional settings from a config file or the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub t_list: Option<Vec<usize>>,
    pub seeds: Option<usize>,
    pub seed: Option<u64>,
    pub iters: Option<usize>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub range: Option<String>,
    pub out: Option<PathBuf>,
    pub p: Option<f64>,
    pub sigma: Option<f64>,
    pub std: Option<f64>,
    pub beta: Option<f64>,
    pub shrink: Option<ShrinkVariant>,
    pub omega: Option<f64>,
    pub target_lambda: Option<f64>,
    pub threshold: Option<f64>,
    pub parallel: Option<bool>,
    pub image: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| CliError::Config(format!("invalid value `{value}` for `{key}`: {e}")))
}

/// Parses a comma-separated list of periods, e.g. `2,4,8`.
pub fn parse_t_list(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|t| parse_value::<usize>("T", t.trim())).collect()
}

impl Overrides {
    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// ignored, unknown keys are errors.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "experiment" => o.experiment = Some(value.parse()?),
                "n" => o.n = Some(parse_value(key, value)?),
                "m" => o.m = Some(parse_value(key, value)?),
                "T" => o.t_list = Some(parse_t_list(value)?),
                "seeds" => o.seeds = Some(parse_value(key, value)?),
                "seed" => o.seed = Some(parse_value(key, value)?),
                "iters" => o.iters = Some(parse_value(key, value)?),
                "a" => o.a = Some(parse_value(key, value)?),
                "b" => o.b = Some(parse_value(key, value)?),
                "range" => o.range = Some(value.to_string()),
                "out" => o.out = Some(PathBuf::from(value)),
                "p" => o.p = Some(parse_value(key, value)?),
                "sigma" => o.sigma = Some(parse_value(key, value)?),
                "std" => o.std = Some(parse_value(key, value)?),
                "beta" => o.beta = Some(parse_value(key, value)?),
                "shrink" => o.shrink = Some(parse_value(key, value)?),
                "omega" => o.omega = Some(parse_value(key, value)?),
                "target_lambda" => o.target_lambda = Some(parse_value(key, value)?),
                "threshold" => o.threshold = Some(parse_value(key, value)?),
                "parallel" => o.parallel = Some(parse_value(key, value)?),
                "image" => o.image = Some(PathBuf::from(value)),
                other => return Err(CliError::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        Ok(o)
    }

    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_str(&text)
    }

    /// Values present in `other` replace those in `self`.
    pub fn merged_with(self, other: Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => { Overrides { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            experiment, n, m, t_list, seeds, seed, iters, a, b, range, out, p, sigma, std, beta, shrink, omega,
            target_lambda, threshold, parallel, image
        )
    }

    /// Resolves against the defaults of `experiment` and validates.
    pub fn resolve(self, experiment: Experiment) -> Result<ExperimentConfig> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(CliError::Config(format!(
                    "config file is for `{}` but the command runs `{}`",
                    e.as_str(),
                    experiment.as_str()
                )));
            }
        }
        let mut c = ExperimentConfig::defaults(experiment);
        macro_rules! set {
            ($($src:ident => $dst:ident),*) => { $(if let Some(v) = self.$src { c.$dst = v; })* };
        }
        set!(n => n, m => m, t_list => t_list, seeds => seeds, seed => base_seed, iters => iters, p => p,
             sigma => sigma, beta => beta_sp, shrink => shrink, omega => omega_r, target_lambda => target_lambda,
             threshold => threshold, parallel => parallel);
        if self.std.is_some() {
            c.std = self.std;
        }
        if self.out.is_some() {
            c.output_dir = self.out;
        }
        if self.image.is_some() {
            c.image = self.image;
        }
        c.range_policy = match (self.range.as_deref(), self.a, self.b) {
            (None | Some("manual"), Some(a), Some(b)) => RangePolicy::Manual { a, b },
            (Some("manual"), _, _) => return Err(CliError::Config("manual range needs both --a and --b".into())),
            (_, Some(_), None) | (_, None, Some(_)) => {
                return Err(CliError::Config("--a and --b must be given together".into()))
            }
            (Some("analytic"), None, None) => RangePolicy::Analytic,
            (Some("pilot"), None, None) => RangePolicy::Pilot,
            (Some(other @ ("analytic" | "pilot")), Some(_), Some(_)) => {
                return Err(CliError::Config(format!("--a/--b conflict with range = {other}")))
            }
            (Some(other), _, _) => {
                return Err(CliError::Config(format!("unknown range policy `{other}` (analytic|pilot|manual)")))
            }
            (None, None, None) => c.range_policy,
        };
        c.validate()?;
        Ok(c)
    }
}

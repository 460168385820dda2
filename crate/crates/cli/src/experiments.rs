//! Experiment drivers: instance generation, solver comparison, and report
//! assembly.
//!
//! Every seeded experiment derives the instance seed of run `i` as
//! `trial_seed(base_seed, i)`; the start point, where random, uses
//! `trial_seed(instance_seed, 1)`. Runs are independent, so parallel and
//! sequential execution produce identical reports.

use std::path::{Path, PathBuf};

use cheby_core::eigen::MAX_DENSE_DIM;
use cheby_core::problems::{
    build_ista, fista_run, gen_gram_matrix, gen_jacobi_matrix, gen_sparse_instance, jacobi_map, richardson_map,
    scaled_std, synthetic_digit, tanh_affine_map, BlurOperator, GrayImage, PowerMap, TanhEquation,
};
use cheby_core::problems::toy::{POWER_MAP_GUARD, TANH_EQUATION_RHS};
use cheby_core::rng::{trial_seed, TrialRng};
use cheby_core::spectral::beta_tilde_grid_max;
use cheby_core::{
    chebyshev_schedule, constant_sor_schedule, eigen_range_at, eigen_range_of_b, q_ci, q_ci_limit, run_inertial, sech_rho_bound,
    symmetric_eigenvalues, EigenRange, FixedPointMap, InertialSchedule, IterationTrace, RangeMethod, StopCriteria,
    StopReason,
};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig, RangePolicy};
use crate::error::{CliError, Result};
use crate::output::{self, SummaryRow, TraceRows};
use crate::pgm;

/// Reference dimension whose Gram spectrum the entry std values describe.
pub const REFERENCE_DIM: usize = 512;
/// Entry std of the Jacobi matrices at the reference dimension.
pub const JACOBI_REFERENCE_STD: f64 = 0.03;
/// Entry std of the tanh Gram matrices at the reference dimension.
pub const TANH_GRAM_REFERENCE_STD: f64 = 0.022;
/// Grid resolution for the `bounds` experiment's `max |β̃_T|` column.
pub const BOUNDS_GRID_POINTS: usize = 10_000;

/// How a trace's raw distances `‖x⁽ᵏ⁾ − x_ref‖` are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMetric {
    /// `‖x⁽ᵏ⁾ − x_ref‖`.
    Norm,
    /// `‖x⁽ᵏ⁾ − x_ref‖² / n`.
    MeanSquare,
}

impl ErrorMetric {
    fn apply(self, dist: f64, n: usize) -> f64 {
        match self {
            ErrorMetric::Norm => dist,
            ErrorMetric::MeanSquare => dist * dist / n as f64,
        }
    }
}

/// The range used for a run, and where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeInfo {
    pub range: EigenRange,
    pub source: &'static str,
    /// The estimate could not be certified as a real spectrum.
    pub uncertified: bool,
}

/// One solver on one instance.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub run_id: usize,
    pub solver: String,
    pub period: Option<usize>,
    /// Reported errors (after the experiment's [`ErrorMetric`]).
    pub errors: Vec<f64>,
    pub trace: IterationTrace,
    pub range: Option<RangeInfo>,
    /// `(sech_rho_bound, q_ci)` for the solver's period.
    pub bound: Option<(f64, f64)>,
    pub iters_to_threshold: Option<usize>,
    pub iters_to_match_plain: Option<usize>,
}

impl RunRecord {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("trace has k = 0")
    }

    pub fn diverged(&self) -> bool {
        self.trace.stop_reason == StopReason::Divergence
    }
}

/// One row of the `bounds` experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub period: usize,
    pub range: EigenRange,
    pub sech_rho_bound: f64,
    pub q_ci: f64,
    pub q_ci_limit: f64,
    /// `max |β̃_T(λ)|` over a uniform grid on `[a, b]`.
    pub beta_tilde_max: f64,
}

/// Everything an experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    pub bounds: Vec<BoundRow>,
    /// Named images to export (deblurring only).
    pub images: Vec<(String, GrayImage)>,
}

impl ExperimentReport {
    pub fn diverged_count(&self) -> usize {
        self.records.iter().filter(|r| r.diverged()).count()
    }

    /// Solver labels in order of first appearance.
    pub fn solvers(&self) -> Vec<String> {
        let mut labels: Vec<String> = Vec::new();
        for r in &self.records {
            if !labels.contains(&r.solver) {
                labels.push(r.solver.clone());
            }
        }
        labels
    }

    pub fn records_for(&self, solver: &str) -> impl Iterator<Item = &RunRecord> + '_ {
        let solver = solver.to_string();
        self.records.iter().filter(move |r| r.solver == solver)
    }

    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        self.records
            .iter()
            .map(|r| SummaryRow {
                run_id: r.run_id,
                solver: r.solver.clone(),
                period: r.period,
                steps: r.trace.steps,
                final_error: r.final_error(),
                iters_to_threshold: r.iters_to_threshold,
                iters_to_match_plain: r.iters_to_match_plain,
                stop_reason: r.trace.stop_reason.as_str(),
                range: r.range.map(|i| (i.range.a(), i.range.b(), i.source)),
                bound: r.bound,
            })
            .collect()
    }

    pub fn render_bounds_csv(&self) -> String {
        let mut out = String::from("T,a,b,sech_rho_bound,q_ci,q_ci_limit,beta_tilde_max\n");
        for b in &self.bounds {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                b.period,
                output::format_f64(b.range.a()),
                output::format_f64(b.range.b()),
                output::format_f64(b.sech_rho_bound),
                output::format_f64(b.q_ci),
                output::format_f64(b.q_ci_limit),
                output::format_f64(b.beta_tilde_max)
            ));
        }
        out
    }

    /// Human-readable digest for the terminal.
    pub fn digest(&self) -> String {
        if self.config.experiment == Experiment::Bounds {
            let mut s = String::from("T  sech_rho_bound     q_ci               q_ci_limit\n");
            for b in &self.bounds {
                s.push_str(&format!("{:<2} {:<18} {:<18} {}\n", b.period, b.sech_rho_bound, b.q_ci, b.q_ci_limit));
            }
            return s;
        }
        let mut s = format!(
            "{} — {} run(s), {} iterations\n{:<10} {:>14} {:>12} {:>10}\n",
            self.config.experiment.as_str(),
            self.records_for("plain").count(),
            self.config.iters,
            "solver",
            "median_error",
            "median_match",
            "diverged"
        );
        for label in self.solvers() {
            let recs: Vec<&RunRecord> = self.records_for(&label).collect();
            let mut finals: Vec<f64> = recs.iter().map(|r| r.final_error()).collect();
            let mut matches: Vec<f64> = recs.iter().filter_map(|r| r.iters_to_match_plain.map(|k| k as f64)).collect();
            let diverged = recs.iter().filter(|r| r.diverged()).count();
            let match_text = median(&mut matches).map(|m| format!("{m}")).unwrap_or_else(|| "-".into());
            s.push_str(&format!(
                "{:<10} {:>14.6e} {:>12} {:>10}\n",
                label,
                median(&mut finals).unwrap_or(f64::NAN),
                match_text,
                diverged
            ));
        }
        if let Some(info) = self.records.iter().find_map(|r| r.range) {
            s.push_str(&format!("range ({}) of run 0: [{}, {}]\n", info.source, info.range.a(), info.range.b()));
        }
        s
    }
}

/// Median of finite values (mean of the middle pair for even counts).
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[mid] } else { 0.5 * (values[mid - 1] + values[mid]) })
}

/// The problem a seeded run works on.
struct Instance<M> {
    map: M,
    x0: Vec<f64>,
    x_ref: Vec<f64>,
    /// The exact fixed point, when known (enables the analytic range).
    x_star: Option<Vec<f64>>,
}

/// A solver variant: label, period and schedule.
struct Solver {
    label: String,
    period: Option<usize>,
    schedule: InertialSchedule,
    bound: Option<(f64, f64)>,
}

/// Plain, constant SOR, and one Chebyshev schedule per distinct `T ≥ 2`.
/// `T = 1` in the list is the constant-SOR schedule.
fn accelerated_solvers(range: EigenRange, t_list: &[usize]) -> Result<Vec<Solver>> {
    let bound = |t: usize| match (sech_rho_bound(range, t), q_ci(range, t)) {
        (Ok(s), Ok(q)) => Some((s, q)),
        _ => None,
    };
    let mut solvers = vec![Solver {
        label: "sor".into(),
        period: Some(1),
        schedule: constant_sor_schedule(range)?,
        bound: bound(1),
    }];
    let mut seen = vec![1usize];
    for &t in t_list {
        if seen.contains(&t) {
            continue;
        }
        seen.push(t);
        solvers.push(Solver {
            label: format!("cheby-{t}"),
            period: Some(t),
            schedule: chebyshev_schedule(range, t)?,
            bound: bound(t),
        });
    }
    Ok(solvers)
}

fn range_method(n: usize) -> RangeMethod {
    if n <= MAX_DENSE_DIM {
        RangeMethod::Dense
    } else {
        RangeMethod::Power
    }
}

fn make_record(
    run_id: usize,
    solver: &str,
    period: Option<usize>,
    trace: IterationTrace,
    metric: ErrorMetric,
    n: usize,
    threshold: f64,
) -> RunRecord {
    let errors: Vec<f64> = trace.errors.iter().map(|&d| metric.apply(d, n)).collect();
    let iters_to_threshold = errors.iter().position(|&e| e <= threshold);
    RunRecord {
        run_id,
        solver: solver.to_string(),
        period,
        errors,
        trace,
        range: None,
        bound: None,
        iters_to_threshold,
        iters_to_match_plain: None,
    }
}

/// Runs plain, constant-SOR and Chebyshev solvers on one instance.
fn run_family<M: FixedPointMap>(
    run_id: usize,
    inst: &Instance<M>,
    config: &ExperimentConfig,
    metric: ErrorMetric,
) -> Result<Vec<RunRecord>> {
    let n = inst.map.dim();
    let stop = StopCriteria::iterations(config.iters);
    let plain = run_inertial(&inst.map, &InertialSchedule::plain(), &inst.x0, stop, Some(&inst.x_ref))?;

    let info = match config.range_policy {
        RangePolicy::Manual { a, b } => RangeInfo { range: EigenRange::new(a, b)?, source: "manual", uncertified: false },
        RangePolicy::Analytic => {
            let x_star = inst.x_star.as_ref().ok_or_else(|| {
                CliError::Config(format!(
                    "{} has no known fixed point; use --range pilot or --a/--b",
                    config.experiment.as_str()
                ))
            })?;
            let est = eigen_range_of_b(&inst.map, x_star, range_method(n))?;
            RangeInfo { range: est.clipped()?, source: "analytic", uncertified: est.warning.is_some() }
        }
        RangePolicy::Pilot => {
            let est = eigen_range_at(&inst.map, &plain.final_iterate, range_method(n))?;
            RangeInfo { range: est.clipped()?, source: "pilot", uncertified: est.warning.is_some() }
        }
    };

    let mut records = vec![make_record(run_id, "plain", None, plain, metric, n, config.threshold)];
    records[0].range = Some(info);
    for solver in accelerated_solvers(info.range, &config.t_list)? {
        let trace = run_inertial(&inst.map, &solver.schedule, &inst.x0, stop, Some(&inst.x_ref))?;
        let mut rec = make_record(run_id, &solver.label, solver.period, trace, metric, n, config.threshold);
        rec.range = Some(info);
        rec.bound = solver.bound;
        records.push(rec);
    }
    Ok(records)
}

/// Fills `iters_to_match_plain`: the first `k` at which a solver's error is
/// at most the plain solver's final error on the same run.
fn attach_match_counts(records: &mut [RunRecord]) {
    let Some(plain_final) = records.iter().find(|r| r.solver == "plain").map(|r| r.final_error()) else {
        return;
    };
    for r in records.iter_mut().filter(|r| r.solver != "plain") {
        r.iters_to_match_plain = r.errors.iter().position(|&e| e <= plain_final);
    }
}

/// Maps `run` over seed indices, sequentially or with rayon, keeping index order.
fn over_seeds<T: Send>(config: &ExperimentConfig, count: usize, run: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    if config.parallel {
        (0..count).into_par_iter().map(&run).collect()
    } else {
        (0..count).map(run).collect()
    }
}

fn finish(config: &ExperimentConfig, per_run: Vec<Vec<RunRecord>>, images: Vec<(String, GrayImage)>) -> ExperimentReport {
    let records = per_run
        .into_iter()
        .flat_map(|mut recs| {
            attach_match_counts(&mut recs);
            recs
        })
        .collect();
    ExperimentReport { config: config.clone(), records, bounds: Vec::new(), images }
}

fn run_bounds(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let RangePolicy::Manual { a, b } = config.range_policy else {
        return Err(CliError::Config("bounds needs a manual range (--a, --b)".into()));
    };
    let range = EigenRange::new(a, b)?;
    let bounds = config
        .t_list
        .iter()
        .map(|&t| {
            let schedule = chebyshev_schedule(range, t)?;
            Ok(BoundRow {
                period: t,
                range,
                sech_rho_bound: sech_rho_bound(range, t)?,
                q_ci: q_ci(range, t)?,
                q_ci_limit: q_ci_limit(range)?,
                beta_tilde_max: beta_tilde_grid_max(&schedule, range, BOUNDS_GRID_POINTS),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport { config: config.clone(), records: Vec::new(), bounds, images: Vec::new() })
}

/// Jacobi on `P = I + MᵀM`, `q = 0` (so `x* = 0`), `x⁽⁰⁾ ~ N(0, I)`.
fn run_jacobi(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = config.n;
    let std = config.std.unwrap_or_else(|| scaled_std(JACOBI_REFERENCE_STD, REFERENCE_DIM, n));
    let per_run = over_seeds(config, config.seeds, |i| {
        let seed = trial_seed(config.base_seed, i as u64);
        let p = gen_jacobi_matrix(n, std, seed);
        let (map, _) = jacobi_map(&p, &vec![0.0; n])?;
        let x0 = TrialRng::new(trial_seed(seed, 1)).gaussian_vec(n, 1.0);
        let zero = vec![0.0; n];
        let inst = Instance { map, x0, x_ref: zero.clone(), x_star: Some(zero) };
        run_family(i, &inst, config, ErrorMetric::Norm)
    })?;
    Ok(finish(config, per_run, Vec::new()))
}

/// The fractional-power map from `(2, 2)`; deterministic, so a single run.
fn run_toy_power(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let x_star = PowerMap::fixed_point().to_vec();
    let inst = Instance {
        map: PowerMap::with_domain_guard(POWER_MAP_GUARD),
        x0: vec![2.0, 2.0],
        x_ref: x_star.clone(),
        x_star: Some(x_star),
    };
    Ok(finish(config, vec![run_family(0, &inst, config, ErrorMetric::Norm)?], Vec::new()))
}

/// `x ↦ y − tanh(x)` from the origin; deterministic, so a single run.
fn run_tanh_solve(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let map = TanhEquation::new(TANH_EQUATION_RHS.to_vec())?;
    let x_star = map.exact_solution();
    let inst = Instance { map, x0: vec![0.0, 0.0], x_ref: x_star.clone(), x_star: Some(x_star) };
    Ok(finish(config, vec![run_family(0, &inst, config, ErrorMetric::Norm)?], Vec::new()))
}

/// Gram matrix with unit-free entries, rescaled so that `λ_max = target`.
pub fn calibrated_gram(n: usize, std: f64, target: f64, seed: u64) -> Result<cheby_core::DenseMatrix> {
    let a = gen_gram_matrix(n, std, seed);
    let lmax = *symmetric_eigenvalues(&a)?.last().expect("n >= 1");
    if !(lmax > 0.0) {
        return Err(CliError::Core(cheby_core::CoreError::DegenerateOperator("Gram matrix is zero")));
    }
    Ok(a.scale(target / lmax))
}

/// `x ↦ tanh(A·x)` with a calibrated random Gram matrix; `x* = 0`.
fn run_tanh_gram(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = config.n;
    let std = config.std.unwrap_or_else(|| scaled_std(TANH_GRAM_REFERENCE_STD, REFERENCE_DIM, n));
    let per_run = over_seeds(config, config.seeds, |i| {
        let seed = trial_seed(config.base_seed, i as u64);
        let map = tanh_affine_map(calibrated_gram(n, std, config.target_lambda, seed)?)?;
        let x0 = TrialRng::new(trial_seed(seed, 1)).gaussian_vec(n, 1.0);
        let zero = vec![0.0; n];
        let inst = Instance { map, x0, x_ref: zero.clone(), x_star: Some(zero) };
        run_family(i, &inst, config, ErrorMetric::Norm)
    })?;
    Ok(finish(config, per_run, Vec::new()))
}

/// ISTA/Chebyshev-ISTA/FISTA on Bernoulli–Gaussian instances, errors as NMSE
/// against the source.
fn run_ista(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (n, m) = (config.n, config.m);
    let per_run = over_seeds(config, config.seeds, |i| {
        let seed = trial_seed(config.base_seed, i as u64);
        let instance = gen_sparse_instance(n, m, config.p, config.sigma, seed);
        let map = build_ista(&instance, config.beta_sp)?.with_variant(config.shrink);
        let inst = Instance { map, x0: vec![0.0; n], x_ref: instance.x_true.clone(), x_star: None };
        let mut records = run_family(i, &inst, config, ErrorMetric::MeanSquare)?;
        let fista = fista_run(&instance, config.iters)?;
        records.push(make_record(i, "fista", None, fista, ErrorMetric::MeanSquare, n, config.threshold));
        Ok(records)
    })?;
    Ok(finish(config, per_run, Vec::new()))
}

/// Richardson deblurring of synthetic digits (or a supplied image) from the
/// observation `x⁽⁰⁾ = y`; errors are `‖x⁽ᵏ⁾ − x‖² / pixels`.
fn run_deblur(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let sources: Vec<GrayImage> = match &config.image {
        Some(path) => vec![pgm::read_pgm(path)?],
        None => (0..config.seeds)
            .map(|i| synthetic_digit(config.n, config.n, trial_seed(config.base_seed, i as u64)))
            .collect(),
    };
    let results = over_seeds(config, sources.len(), |i| {
        let truth = &sources[i];
        let blur = BlurOperator::new(truth.width, truth.height)?;
        let observed = blur.eval(&truth.pixels)?;
        let map = richardson_map(blur, observed.clone(), config.omega_r)?;
        let inst = Instance { map, x0: observed.clone(), x_ref: truth.pixels.clone(), x_star: Some(truth.pixels.clone()) };
        let records = run_family(i, &inst, config, ErrorMetric::MeanSquare)?;
        let mut images = vec![
            (format!("run{i}_truth"), truth.clone()),
            (format!("run{i}_observed"), GrayImage { pixels: observed, ..truth.clone() }),
        ];
        for r in &records {
            images.push((format!("run{i}_{}", r.solver), GrayImage { pixels: r.trace.final_iterate.clone(), ..truth.clone() }));
        }
        Ok((records, images))
    })?;
    let (per_run, images): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(finish(config, per_run, images.into_iter().flatten().collect()))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.experiment {
        Experiment::Bounds => run_bounds(config),
        Experiment::Jacobi => run_jacobi(config),
        Experiment::ToyPower => run_toy_power(config),
        Experiment::TanhSolve => run_tanh_solve(config),
        Experiment::TanhGram => run_tanh_gram(config),
        Experiment::Ista => run_ista(config),
        Experiment::Deblur => run_deblur(config),
    }
}

/// Writes `config.txt`, `summary.csv`, one `trace_<solver>.csv` per solver,
/// and (for deblurring) `images/*.pgm`. Returns the paths written.
pub fn write_outputs(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    output::ensure_dir(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, contents: &str| -> Result<()> {
        let path = dir.join(name);
        output::write_file(&path, contents)?;
        written.push(path);
        Ok(())
    };
    put("config.txt", &report.config.to_string())?;
    if report.config.experiment == Experiment::Bounds {
        put("summary.csv", &report.render_bounds_csv())?;
        return Ok(written);
    }
    put("summary.csv", &output::render_summary_csv(&report.summary_rows()))?;
    for label in report.solvers() {
        let rows: Vec<TraceRows<'_>> = report
            .records_for(&label)
            .map(|r| TraceRows { run_id: r.run_id, solver: &r.solver, errors: &r.errors, omegas: &r.trace.factors_used })
            .collect();
        put(&format!("trace_{label}.csv"), &output::render_trace_csv(&rows))?;
    }
    if !report.images.is_empty() {
        let img_dir = dir.join("images");
        output::ensure_dir(&img_dir)?;
        for (name, image) in &report.images {
            let path = img_dir.join(format!("{name}.pgm"));
            pgm::write_pgm(image, &path)?;
            written.push(path);
        }
    }
    Ok(written)
}

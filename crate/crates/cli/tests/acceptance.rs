//! Acceptance checks at desk scale.
//!
//! Runs every criterion at its stated tolerance, prints one `PASS`/`FAIL`
//! line per criterion, and exits non-zero if any criterion fails. Build with
//! optimisations (the workspace test profile does) — the ISTA sweep runs 100
//! instances × 4 solvers × 1500 iterations.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use cheby_cli::experiments::{median, RunRecord};
use cheby_cli::{run_experiment, Experiment, ExperimentConfig, ExperimentReport};
use cheby_core::oracle::nonsymmetric_eigenvalues;
use cheby_core::problems::toy::{POWER_MAP_GUARD, TANH_EQUATION_RHS};
use cheby_core::problems::{
    build_ista, gen_jacobi_matrix, gen_sparse_instance, jacobi_map, richardson_map, synthetic_digit, tanh_2d_matrix,
    tanh_affine_map, BlurOperator, PowerMap, TanhEquation, TanhForward,
};
use cheby_core::rng::TrialRng;
use cheby_core::spectral::{beta_tilde_grid_max, jacobian_discrepancy};
use cheby_core::{
    chebyshev_schedule, eigen_range_of_b, q_ci_limit, real_spectrum_via_similarity, sech_rho_bound, symmetric_eigen,
    DenseMatrix, EigenRange, FixedPointMap, RangeMethod,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run(experiment: Experiment) -> ExperimentReport {
    let mut config = ExperimentConfig::defaults(experiment);
    config.parallel = true;
    run_experiment(&config).expect("experiment runs")
}

fn first<'a>(report: &'a ExperimentReport, solver: &str) -> &'a RunRecord {
    report.records_for(solver).next().expect("solver present")
}

/// Error at iteration `k`. A run that stopped early on an exactly stationary
/// iterate keeps its final error; a divergent one counts as infinite.
fn error_at(rec: &RunRecord, k: usize) -> f64 {
    match rec.errors.get(k) {
        Some(&e) => e,
        None if rec.diverged() => f64::INFINITY,
        None => rec.final_error(),
    }
}

fn sor_factor() -> Outcome {
    let s = chebyshev_schedule(EigenRange::new(0.6766, 1.922).unwrap(), 1).unwrap();
    let w = s.factors()[0];
    check((w - 0.7697).abs() <= 1e-4, format!("omega = {w:.6}"))
}

fn sech_bounds() -> Outcome {
    let range = EigenRange::new(0.1, 0.9).unwrap();
    let mut details = Vec::new();
    let mut ok = true;
    for (t, want) in [(2, 0.470588), (4, 0.124514), (6, 0.031242)] {
        let bound = sech_rho_bound(range, t).unwrap();
        let grid = beta_tilde_grid_max(&chebyshev_schedule(range, t).unwrap(), range, 10_000);
        ok &= (bound - want).abs() <= 1e-5;
        ok &= grid <= bound + 1e-10 && grid >= 0.999 * bound;
        details.push(format!("T={t}: bound {bound:.6}, grid max {grid:.6}"));
    }
    check(ok, details.join("; "))
}

fn q_ci_clean() -> Outcome {
    let q = q_ci_limit(EigenRange::new(0.1, 0.9).unwrap()).unwrap();
    check((q - 0.5).abs() <= 1e-10, format!("q_ci_limit = {q:.12}"))
}

fn tanh_gram_rate() -> Outcome {
    let report = run(Experiment::TanhGram);
    let mut ok = true;
    let mut details = Vec::new();
    for t in [2usize, 4, 8] {
        let rec = first(&report, &format!("cheby-{t}"));
        let bound = rec.bound.expect("bound recorded").0;
        let e = &rec.errors;
        let start = (0..e.len()).step_by(t).find(|&k| e[k] <= 1e-3);
        let Some(start) = start else {
            ok = false;
            details.push(format!("T={t}: never reached 1e-3"));
            continue;
        };
        let mut worst = 0.0_f64;
        let mut periods = 0;
        let mut k = start;
        while k + t < e.len() && e[k + t] > 1e-12 {
            worst = worst.max(e[k + t] / e[k]);
            periods += 1;
            k += t;
        }
        ok &= periods > 0 && worst <= 1.10 * bound;
        details.push(format!("T={t}: worst {worst:.4} vs 1.1·bound {:.4} over {periods} periods", 1.10 * bound));
    }
    let range = first(&report, "plain").range.unwrap().range;
    details.push(format!("range [{:.4}, {:.4}]", range.a(), range.b()));
    check(ok, details.join("; "))
}

fn toy_power() -> Outcome {
    let mut config = ExperimentConfig::defaults(Experiment::ToyPower);
    config.threshold = 1e-10;
    let report = run_experiment(&config).unwrap();
    let plain = first(&report, "plain");
    let cheby = first(&report, "cheby-8");
    let x = &plain.trace.final_iterate;
    let range = plain.range.unwrap().range;
    let fp_ok = x.iter().all(|v| (v - 2.96).abs() <= 5e-3);
    let range_ok = (range.a() - 0.626).abs() <= 2e-2 && (range.b() - 1.216).abs() <= 2e-2;
    let speed_ok = match (cheby.iters_to_threshold, plain.iters_to_threshold) {
        (Some(c), Some(p)) => c < p,
        (Some(_), None) => true,
        _ => false,
    };
    check(
        fp_ok && range_ok && speed_ok,
        format!(
            "x = ({:.5}, {:.5}); range [{:.4}, {:.4}]; iters to 1e-10: cheby-8 {:?}, plain {:?}",
            x[0],
            x[1],
            range.a(),
            range.b(),
            cheby.iters_to_threshold,
            plain.iters_to_threshold
        ),
    )
}

fn tanh_solve() -> Outcome {
    let report = run(Experiment::TanhSolve);
    let plain = first(&report, "plain");
    let cheby = first(&report, "cheby-8");
    let x = &cheby.trace.final_iterate;
    let fp_ok = (x[0] - 0.0500).abs() <= 5e-4 && (x[1] - 0.3045).abs() <= 5e-4;
    let exact = TanhEquation::new(TANH_EQUATION_RHS.to_vec()).unwrap().exact_solution();
    let exact_ok = (exact[0] - 0.0500).abs() <= 5e-4 && (exact[1] - 0.3045).abs() <= 5e-4;
    let (ec, ep) = (error_at(cheby, 20), error_at(plain, 20));
    check(
        fp_ok && exact_ok && 10.0 * ec <= ep,
        format!("x = ({:.5}, {:.5}); error at k=20: cheby-8 {ec:.3e}, plain {ep:.3e}", x[0], x[1]),
    )
}

fn ista_speedup() -> Outcome {
    let report = run(Experiment::Ista);
    let mut matches: Vec<f64> =
        report.records_for("cheby-8").map(|r| r.iters_to_match_plain.map_or(f64::INFINITY, |k| k as f64)).collect();
    let med = median(&mut matches).unwrap();
    let plain: Vec<&RunRecord> = report.records_for("plain").collect();
    let fista: Vec<&RunRecord> = report.records_for("fista").collect();
    let wins = plain.iter().zip(&fista).filter(|(p, f)| error_at(f, 100) < error_at(p, 100)).count();
    let share = wins as f64 / plain.len() as f64;
    check(
        med <= 400.0 && share >= 0.9,
        format!("median iters to match plain@1500: {med}; FISTA below plain at k=100 in {wins}/{}", plain.len()),
    )
}

fn similarity_property() -> Outcome {
    let mut rng = TrialRng::new(0x7e02);
    let n = 16;
    let mut worst_diff = 0.0_f64;
    let mut worst_imag = 0.0_f64;
    for trial in 0..100 {
        let g = DenseMatrix::from_fn(n, n, |_, _| rng.gaussian());
        let a = g.symmetric_part();
        // Every fifth trial zeroes a few diagonal factors to exercise deflation.
        let q: Vec<f64> =
            (0..n).map(|i| if trial % 5 == 0 && i % 4 == 0 { 0.0 } else { rng.uniform() }).collect();
        let fast = real_spectrum_via_similarity(&q, &a).unwrap();
        let product = a.scale_rows_cols(&q, &vec![1.0; n]);
        let mut brute = nonsymmetric_eigenvalues(&product).unwrap();
        brute.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (f, b) in fast.iter().zip(&brute) {
            worst_diff = worst_diff.max((f - b.re).abs());
            worst_imag = worst_imag.max(b.im.abs());
        }
    }
    check(
        worst_diff <= 1e-6 && worst_imag <= 1e-6,
        format!("100 trials at n=16: max |Δλ| {worst_diff:.2e}, max |Im λ| {worst_imag:.2e}"),
    )
}

/// Eigenvalues of `B = I − J(x*)` from the dense oracle (brute force for
/// small maps, certificate-based dense solver above the oracle's limit).
fn b_spectrum<M: FixedPointMap>(map: &M, x_star: &[f64]) -> Vec<(f64, f64)> {
    let n = map.dim();
    if n <= 16 {
        let j = map.jacobian(x_star).expect("packaged maps have Jacobians");
        let b = j.shifted(-1.0, 1.0).scale(-1.0);
        nonsymmetric_eigenvalues(&b).unwrap().into_iter().map(|z| (z.re, z.im)).collect()
    } else {
        let est = eigen_range_of_b(map, x_star, RangeMethod::Dense).unwrap();
        assert!(est.warning.is_none(), "{} lacks a real-spectrum certificate", map.name());
        vec![(est.a, 0.0), (est.b, 0.0)]
    }
}

fn contraction_property() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut record = |name: &str, spec: Vec<(f64, f64)>| {
        let inside = spec.iter().all(|&(re, im)| re > 0.0 && re < 2.0 && im.abs() <= 1e-9);
        let lo = spec.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let hi = spec.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
        ok &= inside;
        lines.push(format!("{name} [{lo:.4}, {hi:.4}]"));
    };

    for (n, seed) in [(12usize, 1u64), (64, 2)] {
        let p = gen_jacobi_matrix(n, 0.03 * (512.0 / n as f64).sqrt(), seed);
        let (map, _) = jacobi_map(&p, &vec![0.0; n]).unwrap();
        record(&format!("jacobi n={n}"), b_spectrum(&map, &vec![0.0; n]));
    }
    let power = PowerMap::with_domain_guard(POWER_MAP_GUARD);
    record("power", b_spectrum(&power, &PowerMap::fixed_point()));
    let eq = TanhEquation::new(TANH_EQUATION_RHS.to_vec()).unwrap();
    let x_eq = eq.exact_solution();
    record("tanh-solve", b_spectrum(&eq, &x_eq));
    let tanh2 = tanh_affine_map(tanh_2d_matrix()).unwrap();
    record("tanh-2d", b_spectrum(&tanh2, &[0.0, 0.0]));
    let gram = cheby_cli::experiments::calibrated_gram(128, 0.022 * 2.0, 0.97, 3).unwrap();
    let tanh_gram = tanh_affine_map(gram).unwrap();
    record("tanh-gram n=128", b_spectrum(&tanh_gram, &vec![0.0; 128]));
    let forward = TanhForward::new(3);
    let y = forward.eval(&[0.3, -0.2, 0.5]).unwrap();
    let rich = richardson_map(forward, y, 0.5).unwrap();
    record("richardson tanh", b_spectrum(&rich, &[0.3, -0.2, 0.5]));
    let digit = synthetic_digit(28, 28, 1);
    let blur = BlurOperator::new(28, 28).unwrap();
    let observed = blur.eval(&digit.pixels).unwrap();
    let deblur = richardson_map(blur, observed, 0.8).unwrap();
    record("deblur", b_spectrum(&deblur, &digit.pixels));
    check(ok, lines.join("; "))
}

fn symmetric_residual() -> Result<String, String> {
    let mut rng = TrialRng::new(11);
    let mut worst = 0.0_f64;
    for n in [1usize, 2, 5, 16, 33, 64] {
        let s = DenseMatrix::from_fn(n, n, |_, _| rng.gaussian()).symmetric_part();
        let eig = symmetric_eigen(&s).unwrap();
        let norm = s.frobenius_norm();
        for (j, &lambda) in eig.values.iter().enumerate() {
            let v: Vec<f64> = (0..n).map(|i| eig.vectors[(i, j)]).collect();
            let sv = s.matvec(&v);
            let r = sv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(r / norm);
        }
    }
    if worst <= 1e-8 {
        Ok(format!("eigen residual / ‖S‖ ≤ {worst:.2e}"))
    } else {
        Err(format!("eigen residual / ‖S‖ = {worst:.2e}"))
    }
}

fn fd_agreement() -> Result<String, String> {
    let mut rng = TrialRng::new(12);
    let mut worst: Vec<(String, f64)> = Vec::new();
    let mut probe = |name: &str, map: &dyn FixedPointMap, x: &[f64]| {
        let d = jacobian_discrepancy(map, x).unwrap().expect("analytic Jacobian");
        worst.push((name.to_string(), d));
    };
    let p = gen_jacobi_matrix(32, 0.1, 5);
    let (jac, _) = jacobi_map(&p, &rng.gaussian_vec(32, 1.0)).unwrap();
    probe("jacobi", &jac, &rng.gaussian_vec(32, 1.0));
    probe("power", &PowerMap::with_domain_guard(POWER_MAP_GUARD), &[2.0, 2.0]);
    probe("power@x*", &PowerMap::with_domain_guard(POWER_MAP_GUARD), &PowerMap::fixed_point());
    probe("tanh-solve", &TanhEquation::new(TANH_EQUATION_RHS.to_vec()).unwrap(), &[0.3, -0.1]);
    probe("tanh-2d", &tanh_affine_map(tanh_2d_matrix()).unwrap(), &[0.1, 0.2]);
    let gram = cheby_cli::experiments::calibrated_gram(48, 0.06, 0.97, 6).unwrap();
    probe("tanh-gram", &tanh_affine_map(gram).unwrap(), &rng.gaussian_vec(48, 1.0));
    let inst = gen_sparse_instance(64, 32, 0.1, 0.1, 7);
    let ista = build_ista(&inst, 100.0).unwrap();
    probe("ista", &ista, &rng.gaussian_vec(64, 0.5));
    let printed = ista.with_variant(cheby_core::problems::ShrinkVariant::Printed);
    probe("ista printed", &printed, &rng.gaussian_vec(64, 0.5));
    let rich = richardson_map(TanhForward::new(4), vec![0.1, 0.2, 0.3, 0.4], 0.6).unwrap();
    probe("richardson", &rich, &rng.gaussian_vec(4, 1.0));
    let digit = synthetic_digit(28, 28, 8);
    let blur = BlurOperator::new(28, 28).unwrap();
    let y = blur.eval(&digit.pixels).unwrap();
    probe("blur", &blur, &digit.pixels);
    probe("deblur", &richardson_map(blur, y, 0.8).unwrap(), &digit.pixels);
    let max = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    let detail = worst.iter().map(|(n, d)| format!("{n} {d:.1e}")).collect::<Vec<_>>().join(", ");
    if max <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_cli(args: &[&str], out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_cheby"))
        .args(args)
        .arg("--out")
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("binary runs");
    assert!(status.success(), "cheby {args:?} failed");
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn cli_determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["bounds"],
        &["jacobi", "--seeds", "3"],
        &["toy", "--problem", "tanh-gram", "--seeds", "2"],
        &["ista", "--seeds", "3", "--n", "64", "--m", "32", "--iters", "200"],
        &["deblur", "--seeds", "2"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let first = tmp.path().join(format!("{i}a"));
        let second = tmp.path().join(format!("{i}b"));
        let par = tmp.path().join(format!("{i}c"));
        run_cli(args, &first);
        run_cli(args, &second);
        let mut par_args = args.to_vec();
        par_args.push("--parallel");
        run_cli(&par_args, &par);
        let reference = dir_contents(&first);
        if reference.is_empty() || reference != dir_contents(&second) || reference != dir_contents(&par) {
            return Err(format!("outputs of `cheby {}` differ between runs", args.join(" ")));
        }
    }
    Ok(format!("{} commands byte-identical across reruns and --parallel", cases.len()))
}

fn oracle_and_numerics() -> Outcome {
    let parts = [symmetric_residual(), fd_agreement(), cli_determinism()];
    let ok = parts.iter().all(|p| p.is_ok());
    let detail = parts.iter().map(|p| p.clone().unwrap_or_else(|e| format!("FAILED: {e}"))).collect::<Vec<_>>();
    check(ok, detail.join(" | "))
}

fn deblur_gain() -> Outcome {
    let report = run(Experiment::Deblur);
    let plain: Vec<&RunRecord> = report.records_for("plain").collect();
    let cheby: Vec<&RunRecord> = report.records_for("cheby-8").collect();
    let wins = plain.iter().zip(&cheby).filter(|(p, c)| error_at(c, 128) < error_at(p, 128)).count();
    let mut ratios: Vec<f64> = plain.iter().zip(&cheby).map(|(p, c)| error_at(c, 128) / error_at(p, 128)).collect();
    check(
        wins >= 9,
        format!("accelerated better on {wins}/{}; median error ratio {:.3}", plain.len(), median(&mut ratios).unwrap()),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1  constant-SOR factor", sor_factor),
        ("2  sech bound values and grid sweep", sech_bounds),
        ("3  q_ci_limit clean value", q_ci_clean),
        ("4  tanh-Gram per-period rate", tanh_gram_rate),
        ("5  fractional-power map", toy_power),
        ("6  y − tanh(x) equation", tanh_solve),
        ("7  ISTA speedup and FISTA baseline", ista_speedup),
        ("8  similarity spectrum vs brute force", similarity_property),
        ("9  B spectra inside (0, 2)", contraction_property),
        ("10 deblurring gain", deblur_gain),
        ("11 oracle, Jacobians, determinism", oracle_and_numerics),
    ];
    let mut failures = 0;
    for (name, criterion) in criteria {
        let start = Instant::now();
        let outcome = criterion();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{name}] ({secs:.2}s) {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL [{name}] ({secs:.2}s) {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

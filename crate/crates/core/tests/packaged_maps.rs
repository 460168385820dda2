//! Properties that every packaged map must satisfy.

use cheby_core::problems::toy::{POWER_MAP_GUARD, TANH_EQUATION_RHS};
use cheby_core::problems::{
    build_ista, gen_jacobi_matrix, gen_sparse_instance, jacobi_map, richardson_map, scaled_std, synthetic_digit,
    tanh_2d_matrix, tanh_affine_map, BlurOperator, PowerMap, ShrinkVariant, TanhEquation, TanhForward,
};
use cheby_core::rng::TrialRng;
use cheby_core::spectral::jacobian_discrepancy;
use cheby_core::{
    chebyshev_schedule, eigen_range_of_b, inertial_step, run_inertial, DenseMatrix, EigenRange, FixedPointMap,
    InertialSchedule, RangeMethod, StopCriteria,
};
use proptest::prelude::*;

/// Packaged maps with an exactly known fixed point.
fn maps_with_fixed_points() -> Vec<(Box<dyn FixedPointMap>, Vec<f64>)> {
    let mut out: Vec<(Box<dyn FixedPointMap>, Vec<f64>)> = Vec::new();
    let n = 24;
    let p = gen_jacobi_matrix(n, scaled_std(0.03, 512, n), 1);
    out.push((Box::new(jacobi_map(&p, &vec![0.0; n]).unwrap().0), vec![0.0; n]));
    out.push((Box::new(PowerMap::with_domain_guard(POWER_MAP_GUARD)), PowerMap::fixed_point().to_vec()));
    let eq = TanhEquation::new(TANH_EQUATION_RHS.to_vec()).unwrap();
    let x_eq = eq.exact_solution();
    out.push((Box::new(eq), x_eq));
    out.push((Box::new(tanh_affine_map(tanh_2d_matrix()).unwrap()), vec![0.0, 0.0]));
    let g = DenseMatrix::from_fn(16, 16, |i, j| 0.05 / (1.0 + (i as f64 - j as f64).abs()));
    out.push((Box::new(tanh_affine_map(g).unwrap()), vec![0.0; 16]));
    let x_rich = vec![0.3, -0.2, 0.5];
    let forward = TanhForward::new(3);
    let y = forward.eval(&x_rich).unwrap();
    out.push((Box::new(richardson_map(forward, y, 0.5).unwrap()), x_rich));
    let digit = synthetic_digit(12, 12, 4);
    let blur = BlurOperator::new(12, 12).unwrap();
    let observed = blur.eval(&digit.pixels).unwrap();
    out.push((Box::new(richardson_map(blur, observed, 0.8).unwrap()), digit.pixels));
    out
}

#[test]
fn b_spectra_lie_inside_zero_two() {
    for (map, x_star) in maps_with_fixed_points() {
        let est = eigen_range_of_b(map.as_ref(), &x_star, RangeMethod::Dense).unwrap();
        let margin = est.a.min(2.0 - est.b);
        assert!(margin > 0.0, "{}: range [{}, {}]", map.name(), est.a, est.b);
    }
}

#[test]
fn contracting_maps_converge_under_their_chebyshev_schedule() {
    for (map, x_star) in maps_with_fixed_points() {
        let est = eigen_range_of_b(map.as_ref(), &x_star, RangeMethod::Dense).unwrap();
        let schedule = chebyshev_schedule(est.clipped().unwrap(), 8).unwrap();
        // Start close to x* so the local theory applies.
        let x0: Vec<f64> = x_star.iter().map(|v| v + 1e-3).collect();
        let trace = run_inertial(map.as_ref(), &schedule, &x0, StopCriteria::iterations(400), Some(&x_star)).unwrap();
        assert!(trace.final_error() < 1e-3 * trace.errors[0], "{}: {}", map.name(), trace.final_error());
    }
}

#[test]
fn analytic_jacobians_match_finite_differences() {
    let mut rng = TrialRng::new(99);
    let inst = gen_sparse_instance(32, 16, 0.2, 0.1, 3);
    let ista = build_ista(&inst, 100.0).unwrap();
    let printed = ista.clone().with_variant(ShrinkVariant::Printed);
    let p = gen_jacobi_matrix(20, 0.1, 2);
    let (jac, _) = jacobi_map(&p, &rng.gaussian_vec(20, 1.0)).unwrap();
    let gram = DenseMatrix::from_fn(10, 10, |i, j| 0.3 / (1.0 + (i + j) as f64));
    let maps: Vec<(Box<dyn FixedPointMap>, f64)> = vec![
        (Box::new(jac), 1.0),
        (Box::new(tanh_affine_map(tanh_2d_matrix()).unwrap()), 1.0),
        (Box::new(tanh_affine_map(gram).unwrap()), 1.0),
        (Box::new(TanhEquation::new(TANH_EQUATION_RHS.to_vec()).unwrap()), 1.0),
        (Box::new(ista), 0.5),
        (Box::new(printed), 0.5),
        (Box::new(richardson_map(TanhForward::new(5), vec![0.1; 5], 0.7).unwrap()), 1.0),
        (Box::new(BlurOperator::new(10, 9).unwrap()), 1.0),
    ];
    for (map, spread) in &maps {
        for _ in 0..10 {
            let x = rng.gaussian_vec(map.dim(), *spread);
            let d = jacobian_discrepancy(map.as_ref(), &x).unwrap().expect("analytic Jacobian");
            assert!(d <= 1e-6, "{}: discrepancy {d:e}", map.name());
        }
    }
    // The power map is only defined for positive arguments.
    let power = PowerMap::with_domain_guard(POWER_MAP_GUARD);
    for _ in 0..10 {
        let x = [0.5 + 4.0 * rng.uniform(), 0.5 + 4.0 * rng.uniform()];
        assert!(jacobian_discrepancy(&power, &x).unwrap().unwrap() <= 1e-6);
    }
}

#[test]
fn runs_are_deterministic() {
    let range = EigenRange::new(0.3, 1.7).unwrap();
    let schedule = chebyshev_schedule(range, 8).unwrap();
    for (map, x_star) in maps_with_fixed_points() {
        let x0: Vec<f64> = x_star.iter().map(|v| v + 0.01).collect();
        let stop = StopCriteria::iterations(50);
        let a = run_inertial(map.as_ref(), &schedule, &x0, stop, Some(&x_star)).unwrap();
        let b = run_inertial(map.as_ref(), &schedule, &x0, stop, Some(&x_star)).unwrap();
        assert_eq!(a.errors, b.errors);
        assert_eq!(a.final_iterate, b.final_iterate);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_points_are_preserved(omega in -50.0f64..50.0) {
        for (map, x_star) in maps_with_fixed_points() {
            let next = inertial_step(map.as_ref(), &x_star, omega).unwrap();
            let norm = x_star.iter().map(|v| v * v).sum::<f64>().sqrt();
            let dist = next.iter().zip(&x_star).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(dist <= 1e-10 * (1.0 + norm), "{}: moved by {dist:e}", map.name());
        }
    }

    #[test]
    fn unit_schedule_is_plain_iteration(seed in any::<u64>()) {
        let n = 12;
        let p = gen_jacobi_matrix(n, 0.1, seed);
        let mut rng = TrialRng::new(seed);
        let (map, _) = jacobi_map(&p, &rng.gaussian_vec(n, 1.0)).unwrap();
        let x0 = rng.gaussian_vec(n, 1.0);
        let ones = InertialSchedule::from_factors(vec![1.0; 5]).unwrap();
        let trace = cheby_core::run_inertial_with(&map, &ones, &x0, StopCriteria::iterations(30), None, true).unwrap();
        let iterates = trace.iterates.unwrap();
        let mut x = x0.clone();
        for it in iterates.iter().skip(1) {
            x = map.eval(&x).unwrap();
            prop_assert_eq!(it, &x);
        }
    }
}

//! Inertial iteration `x ← (1 − ω_k)·x + ω_k·f(x)` and its runner.

use crate::error::{CoreError, Result};
use crate::linalg::{all_finite, dist2, norm2};
use crate::map::FixedPointMap;
use crate::schedule::InertialSchedule;

/// Default divergence threshold on `‖x‖`.
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e12;

/// When to stop a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCriteria {
    pub max_iters: usize,
    /// Stop once `‖x⁽ᵏ⁺¹⁾ − x⁽ᵏ⁾‖ ≤ step_tol`. Zero runs to `max_iters` unless
    /// an iterate is exactly stationary.
    pub step_tol: f64,
    /// Declare divergence once `‖x⁽ᵏ⁾‖` exceeds this.
    pub divergence_threshold: f64,
}

impl StopCriteria {
    pub fn new(max_iters: usize, step_tol: f64, divergence_threshold: f64) -> Result<Self> {
        if max_iters == 0 {
            return Err(CoreError::InvalidInput("max_iters must be at least 1".into()));
        }
        if !(step_tol >= 0.0) {
            return Err(CoreError::InvalidInput("step_tol must be nonnegative".into()));
        }
        if !(divergence_threshold > 0.0) {
            return Err(CoreError::InvalidInput("divergence_threshold must be positive".into()));
        }
        Ok(Self { max_iters, step_tol, divergence_threshold })
    }

    /// Fixed iteration budget with the default divergence guard.
    pub fn iterations(max_iters: usize) -> Self {
        Self { max_iters: max_iters.max(1), step_tol: 0.0, divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD }
    }

    pub fn with_step_tol(mut self, step_tol: f64) -> Self {
        self.step_tol = step_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxIters,
    Divergence,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Tolerance => "tolerance",
            StopReason::MaxIters => "max_iters",
            StopReason::Divergence => "divergence",
        }
    }
}

/// Record of one run.
///
/// `errors[k] = ‖x⁽ᵏ⁾ − x_ref‖` for `k = 0 … steps`; `factors_used[k]` is the
/// factor that produced `x⁽ᵏ⁺¹⁾`. When no reference is supplied the final
/// iterate is used, which biases the last few entries (roughly one period)
/// toward zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub iterates: Option<Vec<Vec<f64>>>,
    pub errors: Vec<f64>,
    pub factors_used: Vec<f64>,
    pub steps: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub final_iterate: Vec<f64>,
}

impl IterationTrace {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("trace always has k = 0")
    }

    pub fn diverged(&self) -> bool {
        self.stop_reason == StopReason::Divergence
    }

    /// First `k` with `errors[k] ≤ threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.errors.iter().position(|&e| e <= threshold)
    }
}

/// One inertial step `(1 − ω)·x + ω·f(x)`.
pub fn inertial_step<M: FixedPointMap + ?Sized>(map: &M, x: &[f64], omega: f64) -> Result<Vec<f64>> {
    map.check_dim(x)?;
    let fx = map.eval(x)?;
    let out: Vec<f64> = x.iter().zip(&fx).map(|(xi, fi)| (1.0 - omega) * xi + omega * fi).collect();
    if !all_finite(&out) {
        return Err(CoreError::NonFiniteValue("inertial step"));
    }
    Ok(out)
}

/// Runs the inertial iteration with periodic factors, recording errors only.
pub fn run_inertial<M: FixedPointMap + ?Sized>(
    map: &M,
    schedule: &InertialSchedule,
    x0: &[f64],
    stop: StopCriteria,
    x_ref: Option<&[f64]>,
) -> Result<IterationTrace> {
    run_inertial_with(map, schedule, x0, stop, x_ref, false)
}

/// As [`run_inertial`], optionally keeping every iterate.
pub fn run_inertial_with<M: FixedPointMap + ?Sized>(
    map: &M,
    schedule: &InertialSchedule,
    x0: &[f64],
    stop: StopCriteria,
    x_ref: Option<&[f64]>,
    store_iterates: bool,
) -> Result<IterationTrace> {
    map.check_dim(x0)?;
    if let Some(r) = x_ref {
        map.check_dim(r)?;
    }
    match x_ref {
        Some(r) => drive(map, schedule, x0, stop, r, store_iterates),
        None => {
            // First pass finds the final iterate; the second measures against it.
            // Runs are deterministic, so both passes visit identical iterates.
            let first = drive(map, schedule, x0, stop, x0, false)?;
            drive(map, schedule, x0, stop, &first.final_iterate, store_iterates)
        }
    }
}

fn drive<M: FixedPointMap + ?Sized>(
    map: &M,
    schedule: &InertialSchedule,
    x0: &[f64],
    stop: StopCriteria,
    x_ref: &[f64],
    store_iterates: bool,
) -> Result<IterationTrace> {
    let mut x = x0.to_vec();
    let mut errors = Vec::with_capacity(stop.max_iters + 1);
    let mut factors_used = Vec::with_capacity(stop.max_iters);
    let mut iterates = store_iterates.then(|| vec![x.clone()]);
    errors.push(dist2(&x, x_ref));

    let mut stop_reason = StopReason::MaxIters;
    for k in 0..stop.max_iters {
        let omega = schedule.factor_at(k as u64);
        let next = match inertial_step(map, &x, omega) {
            Ok(v) => v,
            Err(CoreError::NonFiniteValue(_)) => {
                stop_reason = StopReason::Divergence;
                break;
            }
            Err(e) => return Err(e),
        };
        let err = dist2(&next, x_ref);
        if !err.is_finite() {
            stop_reason = StopReason::Divergence;
            break;
        }
        let step = dist2(&next, &x);
        x = next;
        errors.push(err);
        factors_used.push(omega);
        if let Some(it) = iterates.as_mut() {
            it.push(x.clone());
        }
        if norm2(&x) > stop.divergence_threshold {
            stop_reason = StopReason::Divergence;
            break;
        }
        if step <= stop.step_tol {
            stop_reason = StopReason::Tolerance;
            break;
        }
    }

    Ok(IterationTrace {
        iterates,
        steps: factors_used.len(),
        errors,
        factors_used,
        converged: stop_reason == StopReason::Tolerance,
        stop_reason,
        final_iterate: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::map::{AffineMap, FnMap};
    use crate::schedule::{chebyshev_schedule, EigenRange};

    fn tanh_map() -> FnMap {
        FnMap::new("tanh", 2, |x| vec![(0.5 * x[0]).tanh(), (0.25 * x[1] + 0.1 * x[0]).tanh()])
    }

    #[test]
    fn unit_factor_is_plain_step() {
        let m = tanh_map();
        let x = [0.3, -0.7];
        assert_eq!(inertial_step(&m, &x, 1.0).unwrap(), m.eval(&x).unwrap());
        assert_eq!(inertial_step(&m, &x, 0.0).unwrap(), x.to_vec());
    }

    #[test]
    fn fixed_point_is_preserved() {
        let m = tanh_map();
        for omega in [0.1, 1.0, 3.7, -2.0, 50.0] {
            let y = inertial_step(&m, &[0.0, 0.0], omega).unwrap();
            assert!(norm2(&y) <= 1e-12);
        }
    }

    #[test]
    fn identity_map_stops_after_one_step() {
        let m = FnMap::identity(3);
        let x0 = [1.0, 2.0, 3.0];
        let tr = run_inertial(&m, &InertialSchedule::plain(), &x0, StopCriteria::iterations(50), None).unwrap();
        assert_eq!(tr.steps, 1);
        assert_eq!(tr.stop_reason, StopReason::Tolerance);
        assert!(tr.converged);
        assert_eq!(tr.final_iterate, x0.to_vec());
        assert_eq!(tr.errors, vec![0.0, 0.0]);
    }

    #[test]
    fn errors_length_and_factors() {
        let m = tanh_map();
        let s = InertialSchedule::from_factors(vec![0.9, 1.1, 1.3]).unwrap();
        let tr = run_inertial_with(&m, &s, &[0.5, 0.5], StopCriteria::iterations(7), Some(&[0.0, 0.0]), true).unwrap();
        assert_eq!(tr.errors.len(), tr.steps + 1);
        assert_eq!(tr.factors_used, vec![0.9, 1.1, 1.3, 0.9, 1.1, 1.3, 0.9]);
        assert_eq!(tr.iterates.as_ref().unwrap().len(), 8);
        assert_eq!(tr.stop_reason, StopReason::MaxIters);
    }

    #[test]
    fn all_ones_schedule_is_plain_iteration() {
        let m = tanh_map();
        let mut x = vec![0.8, -0.4];
        let tr = run_inertial_with(&m, &InertialSchedule::plain(), &x, StopCriteria::iterations(20), Some(&[0.0, 0.0]), true)
            .unwrap();
        let its = tr.iterates.unwrap();
        for step in its.iter().skip(1) {
            x = m.eval(&x).unwrap();
            assert_eq!(step, &x);
        }
    }

    #[test]
    fn missing_reference_uses_final_iterate() {
        let m = tanh_map();
        let tr = run_inertial(&m, &InertialSchedule::plain(), &[0.5, 0.5], StopCriteria::iterations(10), None).unwrap();
        assert_eq!(tr.final_error(), 0.0);
        let with_ref =
            run_inertial(&m, &InertialSchedule::plain(), &[0.5, 0.5], StopCriteria::iterations(10), Some(&tr.final_iterate))
                .unwrap();
        assert_eq!(with_ref.errors, tr.errors);
    }

    #[test]
    fn divergence_is_reported_not_raised() {
        let m = tanh_map();
        let s = InertialSchedule::constant(100.0).unwrap();
        let tr = run_inertial(&m, &s, &[0.5, 0.5], StopCriteria::iterations(200), Some(&[0.0, 0.0])).unwrap();
        assert_eq!(tr.stop_reason, StopReason::Divergence);
        assert!(tr.errors.iter().all(|e| e.is_finite()));
        assert!(!tr.converged);
    }

    #[test]
    fn dimension_mismatch() {
        let m = tanh_map();
        let r = run_inertial(&m, &InertialSchedule::plain(), &[0.5], StopCriteria::iterations(3), None);
        assert!(matches!(r, Err(CoreError::DimensionError { .. })));
        let r = run_inertial(&m, &InertialSchedule::plain(), &[0.5, 0.1], StopCriteria::iterations(3), Some(&[0.0]));
        assert!(matches!(r, Err(CoreError::DimensionError { .. })));
    }

    #[test]
    fn jacobi_two_by_two_constant_schedule_is_monotone() {
        // P = [[4, 1], [1, 3]], q = (1, 2): B = D⁻¹P with eigenvalues 1 ± 1/√12.
        let a = DenseMatrix::from_rows(&[vec![0.0, -0.25], vec![-1.0 / 3.0, 0.0]]).unwrap();
        let m = AffineMap::new("jacobi2", a, vec![0.25, 2.0 / 3.0]).unwrap();
        let x_star = [1.0 / 11.0, 7.0 / 11.0];
        let half = 1.0 / 12f64.sqrt();
        let range = EigenRange::new(1.0 - half, 1.0 + half).unwrap();
        let s = chebyshev_schedule(range, 1).unwrap();
        // Brute-force check that the constant step contracts: both eigenvalues of I − ωB.
        let omega = s.factors()[0];
        assert!((1.0 - omega * range.a()).abs() < 1.0 && (1.0 - omega * range.b()).abs() < 1.0);
        let tr = run_inertial(&m, &s, &[0.0, 0.0], StopCriteria::iterations(40), Some(&x_star)).unwrap();
        for k in 1..tr.errors.len() - 1 {
            assert!(tr.errors[k + 1] <= tr.errors[k] * (1.0 + 1e-12), "k={k}");
        }
        assert!(tr.final_error() < 1e-10);
    }

    #[test]
    fn deterministic() {
        let m = tanh_map();
        let s = InertialSchedule::from_factors(vec![1.5, 0.6]).unwrap();
        let a = run_inertial(&m, &s, &[0.9, 0.2], StopCriteria::iterations(30), None).unwrap();
        let b = run_inertial(&m, &s, &[0.9, 0.2], StopCriteria::iterations(30), None).unwrap();
        assert_eq!(a, b);
    }
}

//! ISTA as a proximal fixed-point map, and the FISTA baseline.
//!
//! With `G = MᵀM`, step `γ = 1/λ_max(G)` and threshold `τ = γλ`, one ISTA
//! step reads `x ↦ η(A·x + b; τ)` where `A = I − γG` and `b = γMᵀy`. The
//! smoothed shrinkage `η̃` makes the map differentiable with Jacobian
//! `diag(η̃′(A·x + b))·A`: a nonnegative diagonal times a symmetric matrix.

use crate::error::{CoreError, Result};
use crate::iteration::{IterationTrace, StopReason};
use crate::linalg::{dist2, power_iteration, DenseMatrix};
use crate::map::{FixedPointMap, SimilarityCertificate};

use super::generators::SparseRecoveryInstance;
use super::shrink::{soft_shrink, ShrinkVariant};

/// Relative tolerance for the `λ_max(G)` power iteration.
pub const GRAM_POWER_TOL: f64 = 1e-10;
/// Iteration cap for the `λ_max(G)` power iteration.
pub const GRAM_POWER_MAX_ITERS: usize = 10_000;

/// Smoothed proximal map `x ↦ η̃(A·x + b; τ)`.
#[derive(Debug, Clone)]
pub struct ProximalProblem {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub tau: f64,
    pub beta_sp: f64,
    pub gamma: f64,
    pub variant: ShrinkVariant,
    /// `λ_max(MᵀM)` as measured by the power iteration.
    pub lambda_max: f64,
}

impl ProximalProblem {
    /// Pre-activation `A·x + b`.
    pub fn affine(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.matvec(x);
        r.iter_mut().zip(&self.b).for_each(|(ri, bi)| *ri += bi);
        r
    }

    /// `η̃′` at each component of `A·x + b`.
    pub fn shrink_slopes(&self, x: &[f64]) -> Vec<f64> {
        self.affine(x).iter().map(|&r| self.variant.derivative(r, self.tau, self.beta_sp)).collect()
    }

    pub fn with_variant(mut self, variant: ShrinkVariant) -> Self {
        self.variant = variant;
        self
    }
}

impl FixedPointMap for ProximalProblem {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn name(&self) -> &str {
        "ista"
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.affine(x).into_iter().map(|r| self.variant.eval(r, self.tau, self.beta_sp)).collect())
    }

    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        let q = self.shrink_slopes(x);
        Some(self.a.scale_rows_cols(&q, &vec![1.0; q.len()]))
    }

    fn similarity_certificate(&self, x: &[f64]) -> Option<SimilarityCertificate> {
        let q = self.shrink_slopes(x);
        // The printed shrinkage has negative slopes for x < −τ, which voids
        // the certificate at such points.
        q.iter().all(|&v| v >= 0.0).then(|| SimilarityCertificate::diagonal_times_symmetric(q, self.a.clone()))
    }
}

/// `A = I − γG`, `b = γMᵀy` and `γ = 1/λ_max(G)` for an instance.
fn gradient_operator(instance: &SparseRecoveryInstance) -> Result<(DenseMatrix, Vec<f64>, f64, f64)> {
    let m = &instance.m_matrix;
    if m.max_abs() == 0.0 {
        return Err(CoreError::DegenerateOperator("sensing matrix is all zero"));
    }
    let g = m.gram();
    let est = power_iteration(g.rows(), |v| g.matvec(v), GRAM_POWER_TOL, GRAM_POWER_MAX_ITERS);
    let lambda_max = est.eigenvalue;
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(CoreError::DegenerateOperator("largest Gram eigenvalue is not positive"));
    }
    let gamma = 1.0 / lambda_max;
    let a = g.shifted(1.0, -gamma);
    let b: Vec<f64> = m.matvec_transpose(&instance.y).iter().map(|v| gamma * v).collect();
    Ok((a, b, gamma, lambda_max))
}

/// ISTA with `γ = τ = 1/λ_max(MᵀM)`.
pub fn build_ista(instance: &SparseRecoveryInstance, beta_sp: f64) -> Result<ProximalProblem> {
    build_ista_regularized(instance, beta_sp, 1.0)
}

/// ISTA for the Lasso weight `λ`: `τ = γλ`.
pub fn build_ista_regularized(instance: &SparseRecoveryInstance, beta_sp: f64, lambda: f64) -> Result<ProximalProblem> {
    if !(beta_sp > 0.0) {
        return Err(CoreError::InvalidInput("softplus sharpness must be positive".into()));
    }
    if !(lambda >= 0.0) {
        return Err(CoreError::InvalidInput("regularisation weight must be nonnegative".into()));
    }
    let (a, b, gamma, lambda_max) = gradient_operator(instance)?;
    Ok(ProximalProblem {
        a,
        b,
        tau: gamma * lambda,
        beta_sp,
        gamma,
        variant: ShrinkVariant::default(),
        lambda_max,
    })
}

/// `t_1 … t_count` with `t_1 = 1`, `t_{k+1} = (1 + √(1 + 4t_k²))/2`.
pub fn fista_momentum(count: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(count);
    let mut tk = 1.0_f64;
    for _ in 0..count {
        t.push(tk);
        tk = 0.5 * (1.0 + (1.0 + 4.0 * tk * tk).sqrt());
    }
    t
}

/// FISTA from `x⁽⁰⁾ = 0` with the exact soft shrinkage and the same `γ`, `τ`
/// as [`build_ista`].
///
/// Errors are measured against `x_true`. `factors_used[k]` records the
/// momentum weight `(t_k − 1)/t_{k+1}` used to form the extrapolated point for
/// step `k + 1`.
pub fn fista_run(instance: &SparseRecoveryInstance, iters: usize) -> Result<IterationTrace> {
    if iters == 0 {
        return Err(CoreError::InvalidInput("FISTA needs at least one iteration".into()));
    }
    let (a, b, gamma, _) = gradient_operator(instance)?;
    let tau = gamma;
    let n = instance.n();
    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t = 1.0_f64;
    let mut errors = Vec::with_capacity(iters + 1);
    let mut factors_used = Vec::with_capacity(iters);
    errors.push(dist2(&x, &instance.x_true));
    let mut stop_reason = StopReason::MaxIters;
    for _ in 0..iters {
        let r = a.matvec(&z);
        let next: Vec<f64> = r.iter().zip(&b).map(|(ri, bi)| soft_shrink(ri + bi, tau)).collect();
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        z = next.iter().zip(&x).map(|(xn, xo)| xn + momentum * (xn - xo)).collect();
        x = next;
        t = t_next;
        let err = dist2(&x, &instance.x_true);
        if !err.is_finite() {
            stop_reason = StopReason::Divergence;
            break;
        }
        errors.push(err);
        factors_used.push(momentum);
    }
    Ok(IterationTrace {
        iterates: None,
        steps: factors_used.len(),
        errors,
        factors_used,
        converged: false,
        stop_reason,
        final_iterate: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::{run_inertial, StopCriteria};
    use crate::problems::generators::gen_sparse_instance;
    use crate::schedule::InertialSchedule;
    use crate::spectral::{default_fd_step, jacobian_fd};
    use crate::spectral::real_spectrum_via_similarity;
    use crate::symmetric_eigenvalues;
    use std::f64::consts::LN_2;

    fn identity_instance(y: Vec<f64>) -> SparseRecoveryInstance {
        let n = y.len();
        SparseRecoveryInstance {
            m_matrix: DenseMatrix::identity(n),
            x_true: y.clone(),
            noise: vec![0.0; n],
            y,
            p: 1.0,
            sigma: 0.0,
            seed: 0,
        }
    }

    #[test]
    fn identity_sensing_reduces_to_shrinkage() {
        let y = vec![2.0, -0.4, 0.9, -3.0, 1.2];
        let prob = build_ista(&identity_instance(y.clone()), 100.0).unwrap();
        assert!((prob.gamma - 1.0).abs() < 1e-12 && (prob.tau - 1.0).abs() < 1e-12);
        assert!(prob.a.max_abs() < 1e-12);
        assert_eq!(prob.b, y.iter().map(|v| v * prob.gamma).collect::<Vec<_>>());
        let x1 = prob.eval(&[0.7; 5]).unwrap();
        for (xi, yi) in x1.iter().zip(&y) {
            assert!((xi - soft_shrink(*yi, 1.0)).abs() <= 2.0 * LN_2 / 100.0);
        }
    }

    #[test]
    fn fista_first_iterate_is_shrinkage() {
        let y = vec![2.0, -0.4, 0.9, -3.0];
        let trace = fista_run(&identity_instance(y.clone()), 1).unwrap();
        let expected: Vec<f64> = y.iter().map(|&v| soft_shrink(v, 1.0)).collect();
        for (got, want) in trace.final_iterate.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(trace.errors.len(), 2);
        assert!(fista_run(&identity_instance(y), 0).is_err());
    }

    #[test]
    fn momentum_sequence() {
        let t = fista_momentum(3);
        assert_eq!(t[0], 1.0);
        assert!((t[1] - 1.618034).abs() < 1e-6);
        assert!((t[2] - 0.5 * (1.0 + (1.0 + 4.0 * t[1] * t[1]).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn rejects_zero_sensing_matrix() {
        let mut inst = identity_instance(vec![1.0, 2.0]);
        inst.m_matrix = DenseMatrix::zeros(2, 2);
        assert!(matches!(build_ista(&inst, 100.0), Err(CoreError::DegenerateOperator(_))));
        assert!(matches!(fista_run(&inst, 3), Err(CoreError::DegenerateOperator(_))));
    }

    #[test]
    fn gamma_matches_dense_eigenvalue() {
        let inst = gen_sparse_instance(40, 20, 0.1, 0.1, 3);
        let prob = build_ista(&inst, 100.0).unwrap();
        let lmax = *symmetric_eigenvalues(&inst.m_matrix.gram()).unwrap().last().unwrap();
        assert!((prob.lambda_max - lmax).abs() <= 1e-8 * lmax);
        assert!(prob.a.relative_asymmetry() <= 1e-12);
    }

    #[test]
    fn jacobian_is_slopes_times_a() {
        let inst = gen_sparse_instance(32, 16, 0.2, 0.1, 11);
        // Moderate sharpness keeps the slopes smooth on the FD scale.
        let prob = build_ista(&inst, 20.0).unwrap();
        let x: Vec<f64> = (0..32).map(|i| (i as f64 * 0.37).sin()).collect();
        let fd = jacobian_fd(&prob, &x, default_fd_step(&x)).unwrap();
        let analytic = prob.jacobian(&x).unwrap();
        assert!(fd.max_abs_diff(&analytic) <= 1e-6);
        let printed = prob.clone().with_variant(ShrinkVariant::Printed);
        let fd = jacobian_fd(&printed, &x, default_fd_step(&x)).unwrap();
        assert!(fd.max_abs_diff(&printed.jacobian(&x).unwrap()) <= 1e-6);
    }

    #[test]
    fn real_spectrum_on_random_instances() {
        for seed in 0..20 {
            let inst = gen_sparse_instance(64, 32, 0.1, 0.1, seed);
            let prob = build_ista(&inst, 100.0).unwrap();
            let x: Vec<f64> = (0..64).map(|i| 0.3 * ((i as f64) * 1.3 + seed as f64).cos()).collect();
            let cert = prob.similarity_certificate(&x).expect("signed slopes are nonnegative");
            assert!(cert.q.iter().all(|&q| (0.0..=1.0 + 1e-15).contains(&q)));
            let spec = real_spectrum_via_similarity(&cert.q, &cert.a).unwrap();
            // Eigenvalues of diag(q)·A with 0 ≤ q ≤ 1 and A ⪯ I lie in (−1, 1].
            assert!(spec.iter().all(|&l| l > -1.0 && l <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn converged_point_contracts() {
        let inst = gen_sparse_instance(64, 32, 0.1, 0.1, 5);
        let prob = build_ista(&inst, 100.0).unwrap();
        let trace = run_inertial(&prob, &InertialSchedule::plain(), &vec![0.0; 64], StopCriteria::iterations(3000), Some(&inst.x_true)).unwrap();
        let j = prob.jacobian(&trace.final_iterate).unwrap();
        let cert = prob.similarity_certificate(&trace.final_iterate).unwrap();
        let spec = real_spectrum_via_similarity(&cert.q, &cert.a).unwrap();
        assert!(spec.iter().all(|&l| l.abs() < 1.0));
        assert!(cert.to_matrix().max_abs_diff(&j) < 1e-15);
    }

    #[test]
    fn fista_beats_ista_early() {
        let inst = gen_sparse_instance(128, 64, 0.1, 0.1, 8);
        let prob = build_ista(&inst, 100.0).unwrap();
        let ista = run_inertial(&prob, &InertialSchedule::plain(), &vec![0.0; 128], StopCriteria::iterations(100), Some(&inst.x_true)).unwrap();
        let fista = fista_run(&inst, 100).unwrap();
        assert!(fista.errors[100] <= ista.errors[100]);
    }
}

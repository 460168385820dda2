//! Small nonlinear maps used to illustrate local convergence.

use crate::error::{CoreError, Result};
use crate::linalg::DenseMatrix;
use crate::map::{FixedPointMap, SimilarityCertificate};

/// `f(x) = tanh(A·x)`.
#[derive(Debug, Clone)]
pub struct TanhAffineMap {
    a: DenseMatrix,
    symmetric: bool,
}

/// Builds `x ↦ tanh(A·x)`; a symmetric `A` also yields a real-spectrum
/// certificate `J = diag(1 − tanh²(A·x))·A`.
pub fn tanh_affine_map(a: DenseMatrix) -> Result<TanhAffineMap> {
    if !a.is_square() {
        return Err(CoreError::InvalidInput("tanh map needs a square matrix".into()));
    }
    let symmetric = a.is_symmetric(0.0);
    Ok(TanhAffineMap { a, symmetric })
}

/// The nonsymmetric 2 × 2 matrix of the two-dimensional tanh illustration.
pub fn tanh_2d_matrix() -> DenseMatrix {
    DenseMatrix::from_rows(&[vec![-0.6929, -0.2487], vec![-0.2870, 0.6005]]).expect("static matrix")
}

/// Start point of the two-dimensional tanh illustration.
pub const TANH_2D_START: [f64; 2] = [0.1, 0.2];

impl TanhAffineMap {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    fn slopes(&self, x: &[f64]) -> Vec<f64> {
        self.a.matvec(x).iter().map(|u| 1.0 - u.tanh().powi(2)).collect()
    }
}

impl FixedPointMap for TanhAffineMap {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn name(&self) -> &str {
        "tanh-affine"
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.a.matvec(x).into_iter().map(f64::tanh).collect())
    }

    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        let q = self.slopes(x);
        Some(self.a.scale_rows_cols(&q, &vec![1.0; q.len()]))
    }

    fn similarity_certificate(&self, x: &[f64]) -> Option<SimilarityCertificate> {
        self.symmetric.then(|| SimilarityCertificate::diagonal_times_symmetric(self.slopes(x), self.a.clone()))
    }
}

/// `f₁ = x₁^0.2 + x₂^0.5`, `f₂ = x₁^0.5 + x₂^0.2` on the open positive quadrant.
#[derive(Debug, Clone, Copy, Default)]
pub struct PowerMap {
    guard: Option<f64>,
}

/// The fractional-power map; nonpositive inputs are a [`CoreError::DomainError`].
pub fn power_map() -> PowerMap {
    PowerMap { guard: None }
}

/// Lower clamp applied by [`PowerMap::with_domain_guard`] in experiments.
pub const POWER_MAP_GUARD: f64 = 1e-9;

impl PowerMap {
    /// Clamps inputs to `≥ floor` instead of rejecting them, so inertial
    /// overshoots below zero do not abort a run.
    pub fn with_domain_guard(floor: f64) -> Self {
        Self { guard: Some(floor) }
    }

    fn prepare(&self, x: &[f64]) -> Result<[f64; 2]> {
        self.check_dim(x)?;
        let mut v = [x[0], x[1]];
        for xi in v.iter_mut() {
            match self.guard {
                Some(floor) if !(*xi >= floor) => *xi = floor,
                None if !(*xi > 0.0) => {
                    return Err(CoreError::DomainError(format!("power map needs positive input, got {xi}")))
                }
                _ => {}
            }
        }
        Ok(v)
    }

    /// The symmetric fixed point `(t, t)` with `t = t^0.2 + t^0.5`, by
    /// Newton's method.
    pub fn fixed_point() -> [f64; 2] {
        let mut t = 3.0_f64;
        for _ in 0..50 {
            let g = t - t.powf(0.2) - t.powf(0.5);
            let dg = 1.0 - 0.2 * t.powf(-0.8) - 0.5 * t.powf(-0.5);
            let step = g / dg;
            t -= step;
            if step.abs() <= 1e-16 * t {
                break;
            }
        }
        [t, t]
    }
}

impl FixedPointMap for PowerMap {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "power"
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let [x1, x2] = self.prepare(x)?;
        Ok(vec![x1.powf(0.2) + x2.powf(0.5), x1.powf(0.5) + x2.powf(0.2)])
    }

    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        let [x1, x2] = self.prepare(x).ok()?;
        DenseMatrix::from_rows(&[
            vec![0.2 * x1.powf(-0.8), 0.5 * x2.powf(-0.5)],
            vec![0.5 * x1.powf(-0.5), 0.2 * x2.powf(-0.8)],
        ])
        .ok()
    }
}

/// `x ↦ y − tanh(x)`, whose fixed point solves `x + tanh(x) = y`.
#[derive(Debug, Clone)]
pub struct TanhEquation {
    y: Vec<f64>,
}

/// Right-hand side of the tanh-equation illustration.
pub const TANH_EQUATION_RHS: [f64; 2] = [0.1, 0.6];

impl TanhEquation {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() || y.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidInput("right-hand side must be a nonempty finite vector".into()));
        }
        Ok(Self { y })
    }

    pub fn rhs(&self) -> &[f64] {
        &self.y
    }

    /// Componentwise Newton solve of `x + tanh(x) = y`.
    pub fn exact_solution(&self) -> Vec<f64> {
        self.y
            .iter()
            .map(|&yi| {
                let mut x = 0.5 * yi;
                for _ in 0..60 {
                    let step = (x + x.tanh() - yi) / (2.0 - x.tanh().powi(2));
                    x -= step;
                    if step.abs() <= 1e-17 * (1.0 + x.abs()) {
                        break;
                    }
                }
                x
            })
            .collect()
    }

    fn slopes(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| 1.0 - v.tanh().powi(2)).collect()
    }
}

impl FixedPointMap for TanhEquation {
    fn dim(&self) -> usize {
        self.y.len()
    }

    fn name(&self) -> &str {
        "tanh-equation"
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(x.iter().zip(&self.y).map(|(xi, yi)| yi - xi.tanh()).collect())
    }

    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        Some(DenseMatrix::from_diagonal(&self.slopes(x)).scale(-1.0))
    }

    fn similarity_certificate(&self, x: &[f64]) -> Option<SimilarityCertificate> {
        Some(SimilarityCertificate {
            shift: 0.0,
            scale: -1.0,
            q: self.slopes(x),
            a: DenseMatrix::identity(self.y.len()),
        })
    }
}

/// Forward operator `x ↦ x + tanh(x)`, for solving the tanh equation by
/// Richardson iteration.
#[derive(Debug, Clone, Copy)]
pub struct TanhForward {
    dim: usize,
}

impl TanhForward {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl FixedPointMap for TanhForward {
    fn dim(&self) -> usize {
        self.dim
    }

    fn name(&self) -> &str {
        "x-plus-tanh"
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(x.iter().map(|v| v + v.tanh()).collect())
    }

    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        Some(DenseMatrix::from_diagonal(&x.iter().map(|v| 2.0 - v.tanh().powi(2)).collect::<Vec<_>>()))
    }

    fn similarity_certificate(&self, x: &[f64]) -> Option<SimilarityCertificate> {
        // J = I + diag(sech²)·I.
        Some(SimilarityCertificate {
            shift: 1.0,
            scale: 1.0,
            q: x.iter().map(|v| 1.0 - v.tanh().powi(2)).collect(),
            a: DenseMatrix::identity(self.dim),
        })
    }
}

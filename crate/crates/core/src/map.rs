//! Fixed-point maps `f: ℝⁿ → ℝⁿ`.

use crate::error::{CoreError, Result};
use crate::linalg::DenseMatrix;

/// Structural proof that a Jacobian has a real spectrum.
///
/// Encodes `J = shift·I + scale·diag(q)·A` with `A` symmetric and `q ≥ 0`.
/// Such a `J` is similar to a symmetric matrix on the support of `q`, so all
/// of its eigenvalues are real.
#[derive(Debug, Clone)]
pub struct SimilarityCertificate {
    pub shift: f64,
    pub scale: f64,
    pub q: Vec<f64>,
    pub a: DenseMatrix,
}

impl SimilarityCertificate {
    /// `J = diag(q)·A`.
    pub fn diagonal_times_symmetric(q: Vec<f64>, a: DenseMatrix) -> Self {
        Self { shift: 0.0, scale: 1.0, q, a }
    }

    /// The Jacobian the certificate describes, as a dense matrix.
    pub fn to_matrix(&self) -> DenseMatrix {
        let ones = vec![1.0; self.q.len()];
        self.a.scale_rows_cols(&self.q, &ones).shifted(self.shift, self.scale)
    }
}

/// A differentiable map with a fixed point of interest.
///
/// Implementations must be free of hidden mutable state so that one map can
/// be evaluated from several threads at once.
pub trait FixedPointMap: Send + Sync {
    fn dim(&self) -> usize;

    fn name(&self) -> &str;

    /// `f(x)`; the output has length [`dim`](Self::dim).
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Analytic Jacobian at `x`, when the map provides one.
    fn jacobian(&self, _x: &[f64]) -> Option<DenseMatrix> {
        None
    }

    /// Real-spectrum certificate for the Jacobian at `x`, when the map's
    /// structure provides one.
    fn similarity_certificate(&self, _x: &[f64]) -> Option<SimilarityCertificate> {
        None
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(CoreError::DimensionError { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }
}

impl<M: FixedPointMap + ?Sized> FixedPointMap for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn name(&self) -> &str {
        (**self).name()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).eval(x)
    }
    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        (**self).jacobian(x)
    }
    fn similarity_certificate(&self, x: &[f64]) -> Option<SimilarityCertificate> {
        (**self).similarity_certificate(x)
    }
}

impl<M: FixedPointMap + ?Sized> FixedPointMap for Box<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn name(&self) -> &str {
        (**self).name()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).eval(x)
    }
    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        (**self).jacobian(x)
    }
    fn similarity_certificate(&self, x: &[f64]) -> Option<SimilarityCertificate> {
        (**self).similarity_certificate(x)
    }
}

type EvalFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type JacFn = dyn Fn(&[f64]) -> DenseMatrix + Send + Sync;

/// Map assembled from closures.
pub struct FnMap {
    name: String,
    dim: usize,
    eval: Box<EvalFn>,
    jacobian: Option<Box<JacFn>>,
}

impl FnMap {
    pub fn new(name: impl Into<String>, dim: usize, eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { name: name.into(), dim, eval: Box::new(eval), jacobian: None }
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&[f64]) -> DenseMatrix + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Box::new(jac));
        self
    }

    /// `f(x) = x`.
    pub fn identity(dim: usize) -> Self {
        Self::new("identity", dim, |x| x.to_vec()).with_jacobian(move |_| DenseMatrix::identity(dim))
    }
}

impl FixedPointMap for FnMap {
    fn dim(&self) -> usize {
        self.dim
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let y = (self.eval)(x);
        if y.len() != self.dim {
            return Err(CoreError::DimensionError { expected: self.dim, got: y.len() });
        }
        Ok(y)
    }

    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        self.jacobian.as_ref().map(|j| j(x))
    }
}

/// Affine map `f(x) = A·x + c`.
#[derive(Debug, Clone)]
pub struct AffineMap {
    name: String,
    a: DenseMatrix,
    c: Vec<f64>,
    certificate: Option<(Vec<f64>, DenseMatrix)>,
}

impl AffineMap {
    pub fn new(name: impl Into<String>, a: DenseMatrix, c: Vec<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(CoreError::InvalidInput("affine map needs a square matrix".into()));
        }
        if c.len() != a.rows() {
            return Err(CoreError::DimensionError { expected: a.rows(), got: c.len() });
        }
        Ok(Self { name: name.into(), a, c, certificate: None })
    }

    /// Declares `A = diag(q)·S` with `S` symmetric and `q ≥ 0`.
    pub fn with_factorisation(mut self, q: Vec<f64>, s: DenseMatrix) -> Self {
        self.certificate = Some((q, s));
        self
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn offset(&self) -> &[f64] {
        &self.c
    }
}

impl FixedPointMap for AffineMap {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut y = self.a.matvec(x);
        for (yi, ci) in y.iter_mut().zip(&self.c) {
            *yi += ci;
        }
        Ok(y)
    }

    fn jacobian(&self, _x: &[f64]) -> Option<DenseMatrix> {
        Some(self.a.clone())
    }

    fn similarity_certificate(&self, _x: &[f64]) -> Option<SimilarityCertificate> {
        if let Some((q, s)) = &self.certificate {
            return Some(SimilarityCertificate::diagonal_times_symmetric(q.clone(), s.clone()));
        }
        self.a
            .is_symmetric(crate::eigen::SYMMETRY_TOL)
            .then(|| SimilarityCertificate::diagonal_times_symmetric(vec![1.0; self.dim()], self.a.clone()))
    }
}

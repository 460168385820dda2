//! Modified Richardson iteration for solving `f(x) = y`.

use crate::error::{CoreError, Result};
use crate::linalg::DenseMatrix;
use crate::map::{FixedPointMap, SimilarityCertificate};

/// `x ↦ x + ω·(y − f(x))`; its fixed points are exactly the solutions of
/// `f(x) = y`.
#[derive(Debug, Clone)]
pub struct RichardsonMap<F> {
    forward: F,
    y: Vec<f64>,
    omega: f64,
}

pub fn richardson_map<F: FixedPointMap>(forward: F, y: Vec<f64>, omega: f64) -> Result<RichardsonMap<F>> {
    if y.len() != forward.dim() {
        return Err(CoreError::DimensionError { expected: forward.dim(), got: y.len() });
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(CoreError::InvalidInput(format!("Richardson factor must be positive, got {omega}")));
    }
    Ok(RichardsonMap { forward, y, omega })
}

impl<F: FixedPointMap> RichardsonMap<F> {
    pub fn forward(&self) -> &F {
        &self.forward
    }

    pub fn target(&self) -> &[f64] {
        &self.y
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl<F: FixedPointMap> FixedPointMap for RichardsonMap<F> {
    fn dim(&self) -> usize {
        self.y.len()
    }

    fn name(&self) -> &str {
        "richardson"
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let fx = self.forward.eval(x)?;
        Ok(x.iter().zip(fx.iter().zip(&self.y)).map(|(xi, (fi, yi))| xi + self.omega * (yi - fi)).collect())
    }

    /// `I − ω·J_f`.
    fn jacobian(&self, x: &[f64]) -> Option<DenseMatrix> {
        self.forward.jacobian(x).map(|j| j.shifted(1.0, -self.omega))
    }

    /// With `J_f = s·I + c·diag(q)·A`: `J = (1 − ωs)·I − ωc·diag(q)·A`.
    fn similarity_certificate(&self, x: &[f64]) -> Option<SimilarityCertificate> {
        self.forward.similarity_certificate(x).map(|c| SimilarityCertificate {
            shift: 1.0 - self.omega * c.shift,
            scale: -self.omega * c.scale,
            q: c.q,
            a: c.a,
        })
    }
}

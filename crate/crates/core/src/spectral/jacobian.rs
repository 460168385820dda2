use crate::error::{CoreError, Result};
use crate::linalg::{all_finite, norm_inf, DenseMatrix};
use crate::map::FixedPointMap;

/// Central-difference step `ε^{1/3}·(1 + ‖x‖∞)`.
pub fn default_fd_step(x: &[f64]) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + norm_inf(x))
}

/// Central-difference Jacobian: column `j` is `(f(x + h e_j) − f(x − h e_j)) / 2h`.
pub fn jacobian_fd<M: FixedPointMap + ?Sized>(map: &M, x: &[f64], h: f64) -> Result<DenseMatrix> {
    map.check_dim(x)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(CoreError::InvalidInput(format!("finite-difference step must be positive, got {h}")));
    }
    let n = map.dim();
    let mut jac = DenseMatrix::zeros(n, n);
    let mut probe = x.to_vec();
    for j in 0..n {
        probe[j] = x[j] + h;
        let fp = map.eval(&probe)?;
        probe[j] = x[j] - h;
        let fm = map.eval(&probe)?;
        probe[j] = x[j];
        if !all_finite(&fp) || !all_finite(&fm) {
            return Err(CoreError::NonFiniteValue("finite-difference evaluation"));
        }
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Relative discrepancy `max|J_analytic − J_fd| / max(1, max|J_analytic|)`, or
/// `None` when the map has no analytic Jacobian.
pub fn jacobian_discrepancy<M: FixedPointMap + ?Sized>(map: &M, x: &[f64]) -> Result<Option<f64>> {
    let Some(analytic) = map.jacobian(x) else {
        return Ok(None);
    };
    let fd = jacobian_fd(map, x, default_fd_step(x))?;
    Ok(Some(analytic.max_abs_diff(&fd) / analytic.max_abs().max(1.0)))
}

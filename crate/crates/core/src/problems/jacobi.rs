//! Jacobi iteration for `P·x = q` as a fixed-point map.

use crate::error::{CoreError, Result};
use crate::linalg::DenseMatrix;
use crate::map::AffineMap;

/// Jacobi map `f(x) = −D⁻¹(P − D)·x + D⁻¹q` with `D = diag(P)`, together
/// with `B = I − J = D⁻¹P`.
///
/// When `P` is symmetric with a positive diagonal the map carries the
/// factorisation `J = D⁻¹·(D − P)`, certifying that `B` has a real spectrum.
pub fn jacobi_map(p: &DenseMatrix, q: &[f64]) -> Result<(AffineMap, DenseMatrix)> {
    if !p.is_square() {
        return Err(CoreError::InvalidInput("Jacobi needs a square matrix".into()));
    }
    let n = p.rows();
    if q.len() != n {
        return Err(CoreError::DimensionError { expected: n, got: q.len() });
    }
    let d = p.diagonal();
    if let Some(i) = d.iter().position(|&di| di == 0.0) {
        return Err(CoreError::SingularDiagonal(i));
    }
    let inv_d: Vec<f64> = d.iter().map(|di| 1.0 / di).collect();
    let ones = vec![1.0; n];
    let b = p.scale_rows_cols(&inv_d, &ones);
    let a = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { -p[(i, j)] * inv_d[i] });
    let c: Vec<f64> = q.iter().zip(&inv_d).map(|(qi, di)| qi * di).collect();
    let mut map = AffineMap::new("jacobi", a, c)?;
    if p.is_symmetric(0.0) && d.iter().all(|&di| di > 0.0) {
        let s = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { -p[(i, j)] });
        map = map.with_factorisation(inv_d, s);
    }
    Ok((map, b))
}

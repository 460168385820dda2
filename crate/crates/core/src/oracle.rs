//! Test oracle: eigenvalues of a small general real matrix.
//!
//! Finds all roots of the characteristic polynomial `p(z) = det(zI − M)` with
//! the Aberth–Ehrlich simultaneous iteration. The Newton ratio is evaluated
//! straight from the matrix, `p(z)/p'(z) = 1 / tr((zI − M)⁻¹)`, through a
//! complex LU factorisation, so the polynomial coefficients are never formed.
//! Only compiled for tests or with the `oracle` feature; production code
//! relies on real-spectrum certificates instead.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::linalg::DenseMatrix;

/// Dimensions above this are refused.
pub const MAX_ORACLE_DIM: usize = 16;

const MAX_SWEEPS: usize = 2_000;

/// All eigenvalues of `m` (complex, unordered).
pub fn nonsymmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(CoreError::DimensionError { expected: m.rows(), got: m.cols() });
    }
    let n = m.rows();
    if n > MAX_ORACLE_DIM {
        return Err(CoreError::InvalidInput(format!("oracle limited to n <= {MAX_ORACLE_DIM}")));
    }
    let scale = m.frobenius_norm().max(1e-300);
    let center = Complex64::new(m.trace() / n as f64, 0.0);
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64 + 0.4;
            center + Complex64::from_polar(scale, theta)
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut worst = 0.0_f64;
        for i in 0..n {
            let newton = match inverse_trace(m, z[i]) {
                Some(t) if t.norm() > 0.0 => t.inv(),
                _ => Complex64::new(0.0, 0.0),
            };
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if step.is_finite() {
                z[i] -= step;
                worst = worst.max(step.norm());
            }
        }
        if worst <= 4.0 * f64::EPSILON * scale {
            break;
        }
    }
    Ok(z)
}

/// `tr((zI − M)⁻¹)`, or `None` when `zI − M` is numerically singular.
fn inverse_trace(m: &DenseMatrix, z: Complex64) -> Option<Complex64> {
    let n = m.rows();
    let mut lu: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let diag = if i == j { z } else { Complex64::new(0.0, 0.0) };
            diag - m[(i, j)]
        })
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| lu[a * n + col].norm().total_cmp(&lu[b * n + col].norm()))?;
        if lu[pivot * n + col].norm() == 0.0 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                lu.swap(pivot * n + j, col * n + j);
            }
            perm.swap(pivot, col);
        }
        let p = lu[col * n + col];
        for r in (col + 1)..n {
            let f = lu[r * n + col] / p;
            lu[r * n + col] = f;
            for j in (col + 1)..n {
                let u = lu[col * n + j];
                lu[r * n + j] -= f * u;
            }
        }
    }
    let mut trace = Complex64::new(0.0, 0.0);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for target in 0..n {
        // Solve (zI − M) x = e_target; row permutation applied to the rhs.
        for (i, r) in rhs.iter_mut().enumerate() {
            *r = if perm[i] == target { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        for i in 0..n {
            let mut s = rhs[i];
            for j in 0..i {
                s -= lu[i * n + j] * rhs[j];
            }
            rhs[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for j in (i + 1)..n {
                s -= lu[i * n + j] * rhs[j];
            }
            rhs[i] = s / lu[i * n + i];
        }
        trace += rhs[target];
    }
    trace.is_finite().then_some(trace)
}

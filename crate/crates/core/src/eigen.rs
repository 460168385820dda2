//! Dense symmetric eigensolver: Householder tridiagonalisation followed by
//! the implicit QL algorithm (the classical EISPACK `tred2`/`tql2` pair).

use crate::error::{CoreError, Result};
use crate::linalg::DenseMatrix;

/// Relative asymmetry accepted by the symmetric solver.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Largest dimension the dense solver accepts.
pub const MAX_DENSE_DIM: usize = 1024;

const MAX_QL_SWEEPS: usize = 64;

/// Eigenvalues in nondecreasing order with matching eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: DenseMatrix,
}

/// All eigenvalues of a symmetric matrix, sorted nondecreasing.
pub fn symmetric_eigenvalues(s: &DenseMatrix) -> Result<Vec<f64>> {
    check_input(s)?;
    let (d, _) = decompose(s, false)?;
    Ok(d)
}

/// Eigenvalues and eigenvectors of a symmetric matrix.
pub fn symmetric_eigen(s: &DenseMatrix) -> Result<SymmetricEigen> {
    check_input(s)?;
    let (values, v) = decompose(s, true)?;
    let n = s.rows();
    let vectors = DenseMatrix::from_row_major(n, n, v.expect("vectors requested"))?;
    Ok(SymmetricEigen { values, vectors })
}

fn check_input(s: &DenseMatrix) -> Result<()> {
    if !s.is_square() {
        return Err(CoreError::DimensionError { expected: s.rows(), got: s.cols() });
    }
    if s.rows() > MAX_DENSE_DIM {
        return Err(CoreError::InvalidInput(format!(
            "dense eigensolver limited to dimension {MAX_DENSE_DIM}, got {}",
            s.rows()
        )));
    }
    let asym = s.relative_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(CoreError::NotSymmetric(asym));
    }
    Ok(())
}

fn decompose(s: &DenseMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = s.rows();
    // Work on the symmetric part so round-off asymmetry cannot leak in.
    let mut v: Vec<f64> = s.symmetric_part().as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e, want_vectors);
    tql2(n, &mut v, &mut d, &mut e, want_vectors)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = vec![0.0; n * n];
        for (new_j, &old_j) in order.iter().enumerate() {
            for k in 0..n {
                out[k * n + new_j] = v[k * n + old_j];
            }
        }
        out
    });
    Ok((values, vectors))
}

/// Householder reduction to tridiagonal form. On exit `d` holds the diagonal,
/// `e[1..]` the subdiagonal, and (when requested) `v` the orthogonal transform.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], want_vectors: bool) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !want_vectors {
        for j in 0..n {
            d[j] = v[at(j, j)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n.saturating_sub(1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix left by [`tred2`].
fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], want_vectors: bool) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] == 0, so m < n always holds here.
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(CoreError::InvalidInput("QL iteration failed to converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if want_vectors {
                        for k in 0..n {
                            let hk = v[at(k, i + 1)];
                            v[at(k, i + 1)] = s * v[at(k, i)] + c * hk;
                            v[at(k, i)] = c * v[at(k, i)] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

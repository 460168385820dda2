//! Small dense linear-algebra toolkit.
//!
//! Row-major `f64` matrices and slice-based vector helpers. Everything here is
//! deliberately plain: the matrices in this crate are at most a few thousand
//! rows and the hot paths are matrix-vector products.

use std::fmt;

use crate::error::{CoreError, Result};

/// Dense row-major matrix of finite reals.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            let row = &self.row(i)[..self.cols.min(8)];
            writeln!(f, "  {:?}{}", row, if self.cols > 8 { " ..." } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(CoreError::InvalidInput("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(CoreError::DimensionError { expected: rows * cols, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFiniteValue("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CoreError::InvalidInput("ragged rows".into()));
        }
        Self::from_row_major(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `y = self · x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "matvec: vector length");
        assert_eq!(y.len(), self.rows, "matvec: output length");
        for (yi, row) in y.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *yi = dot(row, x);
        }
    }

    /// `y = selfᵀ · x`.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec_transpose: vector length");
        let mut y = vec![0.0; self.cols];
        for (row, &xi) in self.data.chunks_exact(self.cols).zip(x) {
            axpy(xi, row, &mut y);
        }
        y
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(CoreError::DimensionError { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &aik) in self.row(i).iter().enumerate() {
                if aik != 0.0 {
                    axpy(aik, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · self`, exactly symmetric by construction.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for row in self.data.chunks_exact(n) {
            for i in 0..n {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in i..n {
                    g.data[i * n + j] += ri * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `alpha·I + beta·self` for square matrices.
    pub fn shifted(&self, alpha: f64, beta: f64) -> Self {
        assert!(self.is_square());
        let mut m = self.scale(beta);
        for i in 0..self.rows {
            m[(i, i)] += alpha;
        }
        m
    }

    /// `diag(left) · self · diag(right)`.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> Self {
        assert_eq!(left.len(), self.rows);
        assert_eq!(right.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| left[i] * self[(i, j)] * right[j])
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest `|S_ij − S_ji|` relative to the largest entry magnitude.
    pub fn relative_asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / scale
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.relative_asymmetry() <= rel_tol
    }

    /// `(self + selfᵀ) / 2`.
    pub fn symmetric_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// Square sub-matrix over the given index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Euclidean distance between two vectors.
pub fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `y += alpha · x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Result of a power iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerEstimate {
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    /// `‖Av − λv‖` for the returned unit vector.
    pub residual: f64,
    pub iterations: usize,
}

/// Power iteration with Rayleigh-quotient estimates.
///
/// Stops when successive estimates agree to `rel_tol` (relative) or after
/// `max_iters` products. The start vector is a fixed, non-degenerate pattern
/// so the result is deterministic.
pub fn power_iteration(
    n: usize,
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    rel_tol: f64,
    max_iters: usize,
) -> PowerEstimate {
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).sin()).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = f64::NAN;
    let mut iterations = 0;
    let mut av = apply(&v);
    for it in 1..=max_iters {
        iterations = it;
        let next_lambda = dot(&v, &av);
        let nav = norm2(&av);
        if nav == 0.0 {
            break;
        }
        let converged = (next_lambda - lambda).abs() <= rel_tol * next_lambda.abs().max(f64::MIN_POSITIVE);
        lambda = next_lambda;
        if converged {
            break;
        }
        v = av.iter().map(|x| x / nav).collect();
        av = apply(&v);
    }
    let av = apply(&v);
    let lambda = dot(&v, &av);
    let residual = av.iter().zip(&v).map(|(a, x)| (a - lambda * x).powi(2)).sum::<f64>().sqrt();
    PowerEstimate { eigenvalue: lambda, eigenvector: v, residual, iterations }
}

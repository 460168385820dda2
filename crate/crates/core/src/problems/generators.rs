//! Seeded random instances.
//!
//! Every generator draws from a single [`TrialRng`] in a fixed order, so an
//! instance is a pure function of its parameters and seed.

use crate::linalg::DenseMatrix;
use crate::rng::TrialRng;

/// Compressed-sensing instance `y = M·x_true + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRecoveryInstance {
    /// `m × n` sensing matrix with N(0, 1) entries.
    pub m_matrix: DenseMatrix,
    pub y: Vec<f64>,
    /// Bernoulli–Gaussian source: nonzero with probability `p`, value N(0, 1).
    pub x_true: Vec<f64>,
    /// The noise realisation `w`, N(0, σ²) entries.
    pub noise: Vec<f64>,
    pub p: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl SparseRecoveryInstance {
    pub fn n(&self) -> usize {
        self.m_matrix.cols()
    }

    pub fn m(&self) -> usize {
        self.m_matrix.rows()
    }

    pub fn nonzero_count(&self) -> usize {
        self.x_true.iter().filter(|&&v| v != 0.0).count()
    }
}

/// Draws, in order: the entries of `M` row by row, then each source entry
/// (a Bernoulli trial followed by a Gaussian value only when it is nonzero),
/// then the noise vector.
pub fn gen_sparse_instance(n: usize, m: usize, p: f64, sigma: f64, seed: u64) -> SparseRecoveryInstance {
    let mut rng = TrialRng::new(seed);
    let m_matrix = DenseMatrix::from_fn(m, n, |_, _| rng.gaussian());
    let x_true: Vec<f64> = (0..n).map(|_| if rng.bernoulli(p) { rng.gaussian() } else { 0.0 }).collect();
    let noise: Vec<f64> = (0..m).map(|_| sigma * rng.gaussian()).collect();
    let mut y = m_matrix.matvec(&x_true);
    y.iter_mut().zip(&noise).for_each(|(yi, wi)| *yi += wi);
    SparseRecoveryInstance { m_matrix, y, x_true, noise, p, sigma, seed }
}

/// `MᵀM` for an `n × n` matrix `M` with N(0, std²) entries.
pub fn gen_gram_matrix(n: usize, std: f64, seed: u64) -> DenseMatrix {
    let mut rng = TrialRng::new(seed);
    DenseMatrix::from_fn(n, n, |_, _| std * rng.gaussian()).gram()
}

/// `P = I + MᵀM` for the Jacobi experiments.
pub fn gen_jacobi_matrix(n: usize, std: f64, seed: u64) -> DenseMatrix {
    gen_gram_matrix(n, std, seed).shifted(1.0, 1.0)
}

/// Entry std at dimension `n` giving the same Gram spectrum as `base_std` at
/// dimension `base_n` (the spectrum of `MᵀM` scales with `n·std²`).
pub fn scaled_std(base_std: f64, base_n: usize, n: usize) -> f64 {
    base_std * (base_n as f64 / n as f64).sqrt()
}

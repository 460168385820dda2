//! Benchmark fixtures shared by the criterion targets.

use cheby_core::problems::{gen_jacobi_matrix, gen_sparse_instance, jacobi_map, scaled_std, SparseRecoveryInstance};
use cheby_core::AffineMap;

/// The Jacobi map on a random SPD matrix of dimension `n` (`q = 0`).
pub fn jacobi_fixture(n: usize, seed: u64) -> AffineMap {
    let p = gen_jacobi_matrix(n, scaled_std(0.03, 512, n), seed);
    jacobi_map(&p, &vec![0.0; n]).expect("generated matrices have a positive diagonal").0
}

/// A sparse-recovery instance with the default experiment settings.
pub fn ista_fixture(n: usize, m: usize, seed: u64) -> SparseRecoveryInstance {
    gen_sparse_instance(n, m, 0.1, 0.1, seed)
}

//! Concrete fixed-point problems.
//!
//! - [`jacobi`]: Jacobi splitting for linear systems.
//! - [`shrink`]: soft shrinkage and its smooth surrogates.
//! - [`ista`]: ISTA as a proximal map, plus the FISTA baseline.
//! - [`richardson`]: modified Richardson iteration for `f(x) = y`.
//! - [`blur`]: sigmoid-of-convolution blur and grayscale images.
//! - [`toy`]: small tanh and fractional-power maps.
//! - [`generators`]: seeded random instances.

pub mod blur;
pub mod generators;
pub mod ista;
pub mod jacobi;
pub mod richardson;
pub mod shrink;
pub mod toy;

pub use blur::{blur_forward, synthetic_digit, BlurOperator, GrayImage};
pub use generators::{gen_gram_matrix, gen_jacobi_matrix, gen_sparse_instance, scaled_std, SparseRecoveryInstance};
pub use ista::{build_ista, build_ista_regularized, fista_momentum, fista_run, ProximalProblem};
pub use jacobi::jacobi_map;
pub use richardson::{richardson_map, RichardsonMap};
pub use shrink::{diff_soft_shrink, diff_soft_shrink_signed, sigmoid, soft_shrink, softplus, ShrinkVariant};
pub use toy::{power_map, tanh_2d_matrix, tanh_affine_map, PowerMap, TanhAffineMap, TanhEquation, TanhForward};

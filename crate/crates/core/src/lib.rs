//! Chebyshev inertial iteration for fixed-point problems.
//!
//! Given a map `f` with a fixed point `x*`, the inertial iteration
//! `x⁽ᵏ⁺¹⁾ = (1 − ω_k)·x⁽ᵏ⁾ + ω_k·f(x⁽ᵏ⁾)` with periodic factors equal to the
//! reciprocals of the Chebyshev roots on the spectrum of `B = I − J*`
//! converges locally at rate `q_CI(T)` per step, which for large periods
//! beats the plain iteration's `ρ(J*)`.
//!
//! - [`schedule`] builds Chebyshev and constant-SOR schedules.
//! - [`iteration`] runs inertial iterations and records traces.
//! - [`spectral`] holds the polynomial machinery, rate bounds and eigen-range
//!   estimation.
//! - [`problems`] packages concrete maps: Jacobi, ISTA/FISTA, Richardson
//!   deblurring, and small nonlinear toy maps.

// `!(x > 0.0)` deliberately rejects NaN; index loops mirror the textbook
// eigensolver and matrix kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod eigen;
pub mod error;
pub mod iteration;
pub mod linalg;
pub mod map;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod problems;
pub mod rng;
pub mod schedule;
pub mod spectral;

pub use eigen::{symmetric_eigen, symmetric_eigenvalues, SymmetricEigen};
pub use error::{CoreError, Result};
pub use iteration::{inertial_step, run_inertial, run_inertial_with, IterationTrace, StopCriteria, StopReason};
pub use linalg::DenseMatrix;
pub use map::{AffineMap, FixedPointMap, FnMap, SimilarityCertificate};
pub use schedule::{chebyshev_roots, chebyshev_schedule, constant_sor_schedule, EigenRange, InertialSchedule};
pub use spectral::{
    atmc_eval, beta_tilde, chebyshev_eval, eigen_range_at, eigen_range_of_b, jacobian_fd, q_ci, q_ci_limit, real_spectrum_via_similarity,
    rho_t_product, sech_rho_bound, ConvergenceBound, RangeEstimate, RangeMethod,
};

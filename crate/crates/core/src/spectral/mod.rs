//! Chebyshev polynomial machinery and local convergence-rate bounds.
//!
//! With Chebyshev factors built on `[a, b]`, the one-period error polynomial
//! `β̃_T(λ) = ∏(1 − ω_k λ)` satisfies `|β̃_T(λ)| ≤ sech(T·acosh((b+a)/(b−a)))`
//! on `[a, b]`. The per-iteration equivalent is
//! `q_CI(T) = sech(T·acosh(·))^{1/T}`, decreasing to `exp(−acosh(·))`.

mod jacobian;
mod range;

pub use jacobian::{default_fd_step, jacobian_discrepancy, jacobian_fd};
pub use range::{
    eigen_range_at, eigen_range_of_b, real_spectrum_via_similarity, rho_t_product, RangeEstimate, RangeMethod, SpectrumWarning,
    POWER_MAX_ITERS, POWER_REL_TOL, RANGE_CLIP_EPS,
};

use crate::error::{CoreError, Result};
use crate::schedule::{chebyshev_schedule, EigenRange, InertialSchedule};

/// `C_T(x)` by the three-term recurrence `C_{k+1} = 2x·C_k − C_{k−1}`.
pub fn chebyshev_eval(t: usize, x: f64) -> f64 {
    match t {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..t {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Affine-transformed monic Chebyshev polynomial on `[a, b]`:
/// `Ĉ_T(x; a, b) = 2^{1−T}·((b−a)/2)^T·C_T((2x − b − a)/(b − a))`.
///
/// Monic in `x`, so `Ĉ_T(x) = ∏(x − z_k)` over the Chebyshev roots; in
/// particular `Ĉ_T(0) = (−1)^T ∏ z_k`.
pub fn atmc_eval(t: usize, x: f64, a: f64, b: f64) -> Result<f64> {
    if t == 0 {
        return Err(CoreError::InvalidInput("degree T must be at least 1".into()));
    }
    if !(a.is_finite() && b.is_finite()) || a == b {
        return Err(CoreError::InvalidRange { a, b, reason: "ATMC polynomial needs a != b" });
    }
    let half = (b - a) / 2.0;
    let scale = 2.0_f64.powi(1 - t as i32) * half.powi(t as i32);
    Ok(scale * chebyshev_eval(t, (2.0 * x - b - a) / (b - a)))
}

/// `β̃_T(λ) = ∏_k (1 − ω_k λ)` over one period of the schedule.
pub fn beta_tilde(lambda: f64, schedule: &InertialSchedule) -> f64 {
    schedule.factors().iter().map(|w| 1.0 - w * lambda).product()
}

fn acosh_ratio(range: EigenRange) -> Result<f64> {
    let (a, b) = (range.a(), range.b());
    if a <= 0.0 {
        return Err(CoreError::InvalidRange { a, b, reason: "bound needs a > 0" });
    }
    if a >= b {
        return Err(CoreError::InvalidRange { a, b, reason: "bound needs a < b" });
    }
    // Rounding can only push the ratio below 1 through cancellation; clamp.
    Ok(((b + a) / (b - a)).max(1.0).acosh())
}

/// `ln sech(y)` without overflow for large `y`.
fn ln_sech(y: f64) -> f64 {
    -y + std::f64::consts::LN_2 - (-2.0 * y).exp().ln_1p()
}

/// Upper bound `sech(T·acosh((b+a)/(b−a)))` on `|β̃_T|` over `[a, b]`.
pub fn sech_rho_bound(range: EigenRange, t: usize) -> Result<f64> {
    check_period(t)?;
    Ok(ln_sech(t as f64 * acosh_ratio(range)?).exp())
}

/// Per-iteration equivalent rate `q_CI(T) = sech(T·acosh(·))^{1/T}`.
pub fn q_ci(range: EigenRange, t: usize) -> Result<f64> {
    check_period(t)?;
    let t = t as f64;
    Ok((ln_sech(t * acosh_ratio(range)?) / t).exp())
}

/// `q_CI* = lim_{T→∞} q_CI(T) = exp(−acosh((b+a)/(b−a)))`.
pub fn q_ci_limit(range: EigenRange) -> Result<f64> {
    Ok((-acosh_ratio(range)?).exp())
}

fn check_period(t: usize) -> Result<()> {
    if t == 0 {
        return Err(CoreError::InvalidInput("period T must be at least 1".into()));
    }
    Ok(())
}

/// Maximum of `|β̃_T(λ)|` over `points` uniformly spaced `λ ∈ [a, b]`.
pub fn beta_tilde_grid_max(schedule: &InertialSchedule, range: EigenRange, points: usize) -> f64 {
    let n = points.max(2);
    let (a, w) = (range.a(), range.b() - range.a());
    (0..n)
        .map(|i| beta_tilde(a + w * i as f64 / (n - 1) as f64, schedule).abs())
        .fold(0.0, f64::max)
}

/// Rate bounds for one range and period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceBound {
    pub range: EigenRange,
    pub period: usize,
    /// Bound on the one-period spectral radius `ρ_T`.
    pub rho_t_bound: f64,
    pub q_ci: f64,
    pub q_ci_limit: f64,
}

impl ConvergenceBound {
    pub fn new(range: EigenRange, t: usize) -> Result<Self> {
        Ok(Self {
            range,
            period: t,
            rho_t_bound: sech_rho_bound(range, t)?,
            q_ci: q_ci(range, t)?,
            q_ci_limit: q_ci_limit(range)?,
        })
    }

    /// Bound together with the schedule it describes.
    pub fn with_schedule(range: EigenRange, t: usize) -> Result<(Self, InertialSchedule)> {
        Ok((Self::new(range, t)?, chebyshev_schedule(range, t)?))
    }
}

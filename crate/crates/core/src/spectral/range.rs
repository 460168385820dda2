//! Spectrum of `B = I − J*` and the one-period spectral radius.

use crate::eigen::{symmetric_eigenvalues, SYMMETRY_TOL};
use crate::error::{CoreError, Result};
use crate::linalg::{dist2, norm2, power_iteration, DenseMatrix};
use crate::map::{FixedPointMap, SimilarityCertificate};
use crate::schedule::{EigenRange, InertialSchedule};

use super::jacobian::{default_fd_step, jacobian_fd};
use super::beta_tilde;

/// Estimated ranges are clipped to `[ε, 2 − ε]` before building schedules.
pub const RANGE_CLIP_EPS: f64 = 1e-6;
pub const POWER_REL_TOL: f64 = 1e-12;
pub const POWER_MAX_ITERS: usize = 10_000;

/// Relative asymmetry below which a numerical Jacobian is treated as symmetric.
const JACOBIAN_SYMMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeMethod {
    Dense,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumWarning {
    /// The Jacobian is not symmetric and no similarity certificate exists;
    /// the range was computed from its symmetric part.
    SpectrumNotCertifiedReal,
}

/// Estimated `[λ_min(B), λ_max(B)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeEstimate {
    pub a: f64,
    pub b: f64,
    pub method: RangeMethod,
    /// Largest power-iteration residual `‖Bv − λv‖` (zero for the dense path).
    pub residual: f64,
    pub warning: Option<SpectrumWarning>,
}

impl RangeEstimate {
    /// The raw estimate as a range (no contraction bounds enforced).
    pub fn range(&self) -> Result<EigenRange> {
        EigenRange::unchecked(self.a, self.b)
    }

    /// The estimate clipped to `[ε, 2 − ε]`, ready for schedule construction.
    pub fn clipped(&self) -> Result<EigenRange> {
        EigenRange::clipped(self.a, self.b, RANGE_CLIP_EPS)
    }
}

/// Eigenvalues of `diag(q)·A` for symmetric `A` and `q ≥ 0`, sorted.
///
/// On the support `P = {i : q_i > 0}` the product is similar to the symmetric
/// `Q_P^{1/2} A_PP Q_P^{1/2}`; rows with `q_i = 0` vanish and contribute zero
/// eigenvalues (after a permutation the matrix is block upper triangular).
pub fn real_spectrum_via_similarity(q: &[f64], a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(CoreError::DimensionError { expected: a.rows(), got: a.cols() });
    }
    if q.len() != a.rows() {
        return Err(CoreError::DimensionError { expected: a.rows(), got: q.len() });
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::NonFiniteValue("diagonal factor"));
    }
    if let Some(v) = q.iter().find(|&&v| v < 0.0) {
        return Err(CoreError::InvalidInput(format!("diagonal factor must be nonnegative, got {v}")));
    }
    let asym = a.relative_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(CoreError::NotSymmetric(asym));
    }
    let support: Vec<usize> = (0..q.len()).filter(|&i| q[i] > 0.0).collect();
    let mut values = vec![0.0; q.len() - support.len()];
    if !support.is_empty() {
        let root: Vec<f64> = support.iter().map(|&i| q[i].sqrt()).collect();
        let s = a.principal_submatrix(&support).scale_rows_cols(&root, &root);
        values.extend(symmetric_eigenvalues(&s)?);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `ρ_T = max_λ |∏(1 − ω_k λ)|` over a real spectrum of `B`.
pub fn rho_t_product(schedule: &InertialSchedule, spectrum: &[f64]) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(CoreError::InvalidInput("empty spectrum".into()));
    }
    Ok(spectrum.iter().map(|&l| beta_tilde(l, schedule).abs()).fold(0.0, f64::max))
}

/// Symmetric matrix whose spectrum equals that of the certified Jacobian.
fn certified_symmetric(cert: &SimilarityCertificate) -> DenseMatrix {
    let root: Vec<f64> = cert.q.iter().map(|v| v.sqrt()).collect();
    cert.a.scale_rows_cols(&root, &root).shifted(cert.shift, cert.scale)
}

/// Estimates `[λ_min(B), λ_max(B)]` for `B = I − J*` at a (near-)fixed point.
///
/// The dense path prefers, in order: the map's similarity certificate, a
/// (numerically) symmetric Jacobian, a closed-form 2×2 spectrum, and finally
/// the symmetric part of the Jacobian with a warning attached. The power path
/// runs power iteration on `B` for `b`, then on `b·I − B` for `b − a`.
pub fn eigen_range_of_b<M: FixedPointMap + ?Sized>(map: &M, x_star: &[f64], method: RangeMethod) -> Result<RangeEstimate> {
    map.check_dim(x_star)?;
    let fx = map.eval(x_star)?;
    let residual = dist2(&fx, x_star);
    if !(residual <= 1e-6 * (1.0 + norm2(x_star))) {
        return Err(CoreError::NotAFixedPoint(residual));
    }
    eigen_range_at(map, x_star, method)
}

/// As [`eigen_range_of_b`] but without the fixed-point check: the spectrum of
/// `I − J(x)` at an arbitrary point, e.g. the end of a pilot run that only
/// approximates `x*`.
pub fn eigen_range_at<M: FixedPointMap + ?Sized>(map: &M, x: &[f64], method: RangeMethod) -> Result<RangeEstimate> {
    map.check_dim(x)?;
    match method {
        RangeMethod::Dense => dense_range(map, x),
        RangeMethod::Power => power_range(map, x),
    }
}

fn jacobian_at<M: FixedPointMap + ?Sized>(map: &M, x: &[f64]) -> Result<DenseMatrix> {
    match map.jacobian(x) {
        Some(j) => Ok(j),
        None => jacobian_fd(map, x, default_fd_step(x)),
    }
}

fn from_jacobian_spectrum(mut j_values: Vec<f64>, warning: Option<SpectrumWarning>) -> RangeEstimate {
    j_values.sort_by(f64::total_cmp);
    let (lo, hi) = (j_values[0], j_values[j_values.len() - 1]);
    RangeEstimate { a: 1.0 - hi, b: 1.0 - lo, method: RangeMethod::Dense, residual: 0.0, warning }
}

fn dense_range<M: FixedPointMap + ?Sized>(map: &M, x: &[f64]) -> Result<RangeEstimate> {
    if let Some(cert) = map.similarity_certificate(x) {
        let base = real_spectrum_via_similarity(&cert.q, &cert.a)?;
        let j: Vec<f64> = base.iter().map(|l| cert.shift + cert.scale * l).collect();
        return Ok(from_jacobian_spectrum(j, None));
    }
    let j = jacobian_at(map, x)?;
    if j.is_symmetric(JACOBIAN_SYMMETRY_TOL) {
        return Ok(from_jacobian_spectrum(symmetric_eigenvalues(&j.symmetric_part())?, None));
    }
    if j.rows() == 2 {
        let (p, q, r, s) = (j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)]);
        let half_trace = 0.5 * (p + s);
        let disc = 0.25 * (p - s) * (p - s) + q * r;
        if disc >= 0.0 {
            let root = disc.sqrt();
            return Ok(from_jacobian_spectrum(vec![half_trace - root, half_trace + root], None));
        }
    }
    let values = symmetric_eigenvalues(&j.symmetric_part())?;
    Ok(from_jacobian_spectrum(values, Some(SpectrumWarning::SpectrumNotCertifiedReal)))
}

/// Matrix-free application of `J(x)`.
type JacobianApply<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;

fn power_range<M: FixedPointMap + ?Sized>(map: &M, x: &[f64]) -> Result<RangeEstimate> {
    let n = map.dim();
    let (apply_j, warning): (JacobianApply<'_>, _) = if let Some(cert) = map.similarity_certificate(x) {
        let s = certified_symmetric(&cert);
        (Box::new(move |v: &[f64]| s.matvec(v)), None)
    } else if let Some(j) = map.jacobian(x) {
        let w = (!j.is_symmetric(JACOBIAN_SYMMETRY_TOL)).then_some(SpectrumWarning::SpectrumNotCertifiedReal);
        (Box::new(move |v: &[f64]| j.matvec(v)), w)
    } else {
        // Matrix-free directional differences J·v ≈ (f(x + hv) − f(x − hv)) / 2h.
        let h = default_fd_step(x);
        let x0 = x.to_vec();
        let map_ref = &map;
        let f = move |v: &[f64]| {
            let plus: Vec<f64> = x0.iter().zip(v).map(|(a, b)| a + h * b).collect();
            let minus: Vec<f64> = x0.iter().zip(v).map(|(a, b)| a - h * b).collect();
            let fp = map_ref.eval(&plus).unwrap_or_else(|_| vec![f64::NAN; plus.len()]);
            let fm = map_ref.eval(&minus).unwrap_or_else(|_| vec![f64::NAN; minus.len()]);
            fp.iter().zip(&fm).map(|(p, m)| (p - m) / (2.0 * h)).collect::<Vec<f64>>()
        };
        // Without structure a real spectrum cannot be certified.
        let boxed: JacobianApply<'_> = Box::new(f);
        (boxed, Some(SpectrumWarning::SpectrumNotCertifiedReal))
    };

    let apply_b = |v: &[f64]| -> Vec<f64> { v.iter().zip(apply_j(v)).map(|(vi, jv)| vi - jv).collect() };
    let top = power_iteration(n, apply_b, POWER_REL_TOL, POWER_MAX_ITERS);
    let b = top.eigenvalue;
    let shifted = |v: &[f64]| -> Vec<f64> { v.iter().zip(apply_b(v)).map(|(vi, bv)| b * vi - bv).collect() };
    let width = power_iteration(n, shifted, POWER_REL_TOL, POWER_MAX_ITERS);
    if !b.is_finite() || !width.eigenvalue.is_finite() {
        return Err(CoreError::NonFiniteValue("power iteration"));
    }
    Ok(RangeEstimate {
        a: b - width.eigenvalue,
        b,
        method: RangeMethod::Power,
        residual: top.residual.max(width.residual),
        warning,
    })
}

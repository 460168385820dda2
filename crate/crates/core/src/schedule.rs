//! Inertial factor schedules.
//!
//! A schedule is a periodic list of factors `ω_0 … ω_{T−1}`; step `k` of an
//! inertial iteration uses `ω_{k mod T}`. The Chebyshev schedule takes the
//! reciprocals of the Chebyshev roots on `[λ_min(B), λ_max(B)]`.

use std::f64::consts::PI;

use crate::error::{CoreError, Result};

/// Interval `[a, b]` containing the spectrum of `B = I − J*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRange {
    a: f64,
    b: f64,
}

impl EigenRange {
    /// Range for a locally contracting map: requires `0 < a ≤ b < 2`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let r = Self::unchecked(a, b)?;
        if a <= 0.0 {
            return Err(CoreError::InvalidRange { a, b, reason: "lower end must be positive" });
        }
        if b >= 2.0 {
            return Err(CoreError::InvalidRange { a, b, reason: "upper end must be below 2" });
        }
        Ok(r)
    }

    /// Range without the contraction bounds; still requires finite `a ≤ b`.
    pub fn unchecked(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(CoreError::InvalidRange { a, b, reason: "endpoints must be finite" });
        }
        if a > b {
            return Err(CoreError::InvalidRange { a, b, reason: "lower end exceeds upper end" });
        }
        Ok(Self { a, b })
    }

    /// Clamps both ends into `[eps, 2 − eps]`.
    pub fn clipped(a: f64, b: f64, eps: f64) -> Result<Self> {
        let lo = eps;
        let hi = 2.0 - eps;
        Self::new(a.clamp(lo, hi), b.clamp(lo, hi))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `λ₊ = (b + a) / 2`.
    pub fn center(&self) -> f64 {
        (self.b + self.a) * 0.5
    }

    /// `λ₋ = (b − a) / 2`.
    pub fn half_width(&self) -> f64 {
        (self.b - self.a) * 0.5
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.a..=self.b).contains(&x)
    }
}

/// Periodic inertial factors.
#[derive(Debug, Clone, PartialEq)]
pub struct InertialSchedule {
    factors: Vec<f64>,
    range: Option<EigenRange>,
}

impl InertialSchedule {
    /// Manual schedule from explicit factors.
    pub fn from_factors(factors: Vec<f64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(CoreError::InvalidInput("schedule needs at least one factor".into()));
        }
        if factors.iter().any(|w| !w.is_finite()) {
            return Err(CoreError::NonFiniteValue("inertial factors"));
        }
        Ok(Self { factors, range: None })
    }

    pub fn constant(omega: f64) -> Result<Self> {
        Self::from_factors(vec![omega])
    }

    /// All-ones schedule: the plain fixed-point iteration.
    pub fn plain() -> Self {
        Self { factors: vec![1.0], range: None }
    }

    pub fn period(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    /// The range the schedule was built from, if any.
    pub fn range(&self) -> Option<EigenRange> {
        self.range
    }

    /// Factor applied at step `k`: `factors[k mod T]`.
    pub fn factor_at(&self, k: u64) -> f64 {
        self.factors[(k % self.factors.len() as u64) as usize]
    }

    /// Reorders the factors within a period; `order[j]` is the index of the
    /// factor used at position `j`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let t = self.period();
        let mut seen = vec![false; t];
        if order.len() != t {
            return Err(CoreError::DimensionError { expected: t, got: order.len() });
        }
        for &i in order {
            if i >= t || std::mem::replace(&mut seen[i], true) {
                return Err(CoreError::InvalidInput("order is not a permutation".into()));
            }
        }
        Ok(Self { factors: order.iter().map(|&i| self.factors[i]).collect(), range: self.range })
    }
}

/// Chebyshev roots `z_k = λ₊ + λ₋·cos((2k+1)π/(2T))`, `k = 0 … T−1`.
///
/// The cosine is evaluated as `sin(π(T − 2k − 1)/(2T))`, which is exactly zero
/// at the middle root of odd `T` and exactly antisymmetric about it.
pub fn chebyshev_roots(range: EigenRange, t: usize) -> Result<Vec<f64>> {
    if t == 0 {
        return Err(CoreError::InvalidInput("period T must be at least 1".into()));
    }
    let (center, half) = (range.center(), range.half_width());
    let denom = 2.0 * t as f64;
    Ok((0..t)
        .map(|k| {
            let num = t as f64 - (2 * k + 1) as f64;
            let c = (PI * num / denom).sin();
            (center + half * c).clamp(range.a(), range.b())
        })
        .collect())
}

/// Chebyshev inertial factors `ω_k = 1/z_k`.
pub fn chebyshev_schedule(range: EigenRange, t: usize) -> Result<InertialSchedule> {
    if range.a() <= 0.0 {
        return Err(CoreError::InvalidRange { a: range.a(), b: range.b(), reason: "roots must be positive" });
    }
    let factors = chebyshev_roots(range, t)?.into_iter().map(|z| 1.0 / z).collect();
    Ok(InertialSchedule { factors, range: Some(range) })
}

/// Optimal constant factor `ω = 2/(a + b)`; identical to the `T = 1`
/// Chebyshev schedule.
pub fn constant_sor_schedule(range: EigenRange) -> Result<InertialSchedule> {
    if range.a() + range.b() <= 0.0 {
        return Err(CoreError::InvalidRange { a: range.a(), b: range.b(), reason: "a + b must be positive" });
    }
    Ok(InertialSchedule { factors: vec![1.0 / range.center()], range: Some(range) })
}

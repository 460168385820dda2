//! Soft shrinkage and its softplus-smoothed surrogates.

/// `η(x; τ) = sign(x)·max(|x| − τ, 0)`.
pub fn soft_shrink(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// `s_p(x) = (1/β)·ln(1 + e^{βx})`, evaluated as
/// `(max(βx, 0) + ln1p(e^{−|βx|})) / β` so neither branch overflows.
pub fn softplus(x: f64, beta: f64) -> f64 {
    let u = beta * x;
    (u.max(0.0) + (-u.abs()).exp().ln_1p()) / beta
}

/// Logistic function, branch-stable for large `|u|`.
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Which smoothed shrinkage a proximal map uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShrinkVariant {
    /// `s_p(x − τ) + s_p(−(x + τ))`: even in `x`, approximates `max(|x| − τ, 0)`.
    Printed,
    /// `s_p(x − τ) − s_p(−(x + τ))`: odd in `x`, approximates `η(x; τ)`.
    #[default]
    SignCorrected,
}

impl ShrinkVariant {
    pub fn eval(self, x: f64, tau: f64, beta: f64) -> f64 {
        match self {
            ShrinkVariant::Printed => diff_soft_shrink(x, tau, beta),
            ShrinkVariant::SignCorrected => diff_soft_shrink_signed(x, tau, beta),
        }
    }

    pub fn derivative(self, x: f64, tau: f64, beta: f64) -> f64 {
        let right = sigmoid(beta * (x - tau));
        let left = sigmoid(-beta * (x + tau));
        match self {
            ShrinkVariant::Printed => right - left,
            ShrinkVariant::SignCorrected => right + left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ShrinkVariant::Printed => "printed",
            ShrinkVariant::SignCorrected => "signed",
        }
    }
}

impl std::str::FromStr for ShrinkVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "printed" => Ok(ShrinkVariant::Printed),
            "signed" => Ok(ShrinkVariant::SignCorrected),
            other => Err(format!("unknown shrink variant `{other}` (expected printed|signed)")),
        }
    }
}

/// `η̃(x; τ) = s_p(x − τ) + s_p(−(x + τ))`, the literal smoothed form.
///
/// For `x < −τ` this tends to `|x| − τ` rather than `x + τ`; see
/// [`diff_soft_shrink_signed`] for the odd variant.
pub fn diff_soft_shrink(x: f64, tau: f64, beta: f64) -> f64 {
    softplus(x - tau, beta) + softplus(-(x + tau), beta)
}

/// `s_p(x − τ) − s_p(−(x + τ))`: odd, derivative in `(0, 1)`, and within
/// `ln 2/β` of `η(x; τ)` everywhere.
pub fn diff_soft_shrink_signed(x: f64, tau: f64, beta: f64) -> f64 {
    softplus(x - tau, beta) - softplus(-(x + tau), beta)
}

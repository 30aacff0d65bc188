use serde::Serialize;

use super::PressureLaw;
use crate::error::{Error, Result};

/// Outcome of checking `(1/a) rho^(gamma-1) - b <= p'(rho) <= a rho^(gamma-1) + b`
/// on a log-spaced sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthBoundReport {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub rho_range: (f64, f64),
    pub samples: usize,
    /// Largest signed violation over both inequalities; `<= 0` means both hold.
    pub worst_margin: f64,
    pub worst_rho: f64,
    pub pass: bool,
}

/// Evaluates both growth inequalities on `samples` log-spaced densities in
/// `rho_range`. Margins carry a rounding allowance of a few ulps of the
/// compared magnitudes, so an inequality that holds with equality passes.
pub fn check_growth_bounds(
    law: &PressureLaw,
    a: f64,
    b: f64,
    gamma: f64,
    rho_range: (f64, f64),
    samples: usize,
) -> Result<GrowthBoundReport> {
    if !(a > 0.0 && b >= 0.0 && gamma.is_finite()) {
        return Err(Error::Param(format!("growth bounds need a > 0 and b >= 0, got a = {a}, b = {b}")));
    }
    if samples < 2 {
        return Err(Error::Param("growth bounds need at least 2 samples".into()));
    }
    let (lo, hi) = rho_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Param(format!("invalid density range [{lo}, {hi}]")));
    }
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let mut worst = (f64::NEG_INFINITY, lo);
    for k in 0..samples {
        let s = k as f64 / (samples - 1) as f64;
        let rho = if k == samples - 1 { hi } else { (ln_lo + s * (ln_hi - ln_lo)).exp() };
        let margin = growth_margin(law, a, b, gamma, rho);
        if margin > worst.0 {
            worst = (margin, rho);
        }
    }
    Ok(GrowthBoundReport {
        a,
        b,
        gamma,
        rho_range,
        samples,
        worst_margin: worst.0,
        worst_rho: worst.1,
        pass: worst.0 <= 0.0,
    })
}

pub(crate) fn growth_margin(law: &PressureLaw, a: f64, b: f64, gamma: f64, rho: f64) -> f64 {
    let dp = law.dp(rho);
    let power = rho.powf(gamma - 1.0);
    let upper = a * power + b;
    let lower = power / a - b;
    let slack = 4.0 * f64::EPSILON * (dp.abs() + upper.abs() + lower.abs());
    (lower - dp).max(dp - upper) - slack
}

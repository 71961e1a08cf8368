//! Monte Carlo estimators of the closed-form quantities.

use super::config::{SimConfig, V0Mode};
use super::paths::{simulate_heston, PathBundle};
use crate::error::{invalid, Error, Result};
use crate::heston::HestonParams;
use crate::stats::{jackknife_means, mean_estimate, sample_moments, Estimate, MomentSet};
use crate::units::Horizon;

/// Moments of the terminal log return with jackknife standard errors.
pub fn mc_moments(b: &PathBundle) -> Result<MomentSet> {
    if !b.has_returns() {
        return Err(invalid("bundle carries no log returns"));
    }
    Ok(sample_moments(&b.x)?.to_moment_set())
}

/// `-rho` times the sample mean of `(∫V ds)(∫sqrt(V) dW)`.
pub fn emiv_mc(b: &PathBundle, rho: f64) -> Result<Estimate> {
    if rho == 0.0 {
        return Ok(Estimate { value: 0.0, se: 0.0 });
    }
    let prod: Vec<f64> = b.int_var.iter().zip(&b.stoch_int).map(|(a, s)| a * s).collect();
    let m = mean_estimate(&prod)?;
    Ok(Estimate { value: -rho * m.value, se: rho.abs() * m.se })
}

/// A quarter of the sample variance of `∫V ds`.
pub fn viv_mc(b: &PathBundle) -> Result<Estimate> {
    let n = b.len();
    let pivot = b.int_var.first().copied().unwrap_or(0.0);
    jackknife_means(
        n,
        |i| {
            let d = b.int_var[i] - pivot;
            [d, d * d]
        },
        |m| 0.25 * (m[1] - m[0] * m[0]) * n as f64 / (n as f64 - 1.0),
    )
}

/// `Var[X_t | V_0 = v0]` by simulation.
///
/// Uses the decomposition `E[∫V] + Var[∫V]/4 - rho Cov(∫V, ∫sqrt(V) dW)`,
/// which equals the conditional variance of `X_t` and is exact for a
/// deterministic variance path.
pub fn conditional_variance(p: &HestonParams, v0: f64, t: Horizon, cfg: &SimConfig) -> Result<Estimate> {
    let b = simulate_heston(p, V0Mode::Fixed(v0), &cfg.with_horizon(t))?;
    conditional_variance_of(&b, p.rho())
}

pub fn conditional_variance_of(b: &PathBundle, rho: f64) -> Result<Estimate> {
    let n = b.len();
    if n < 2 {
        return Err(Error::InsufficientData("conditional variance needs at least 2 paths".into()));
    }
    let (p_iv, p_si) = (b.int_var[0], b.stoch_int[0]);
    let bessel = n as f64 / (n as f64 - 1.0);
    jackknife_means(
        n,
        |i| {
            let a = b.int_var[i] - p_iv;
            let s = b.stoch_int[i] - p_si;
            [a, a * a, s, a * s]
        },
        |m| {
            let var_iv = (m[1] - m[0] * m[0]) * bessel;
            let cov = (m[3] - m[0] * m[2]) * bessel;
            (m[0] + p_iv) + 0.25 * var_iv - rho * cov
        },
    )
}

/// Square-root-of-time prediction `v0 * t`.
pub fn srtr_prediction(v0: f64, t: Horizon) -> Result<f64> {
    if !(v0 >= 0.0 && v0.is_finite()) {
        return Err(invalid(format!("v0 must be non-negative, got {v0}")));
    }
    Ok(v0 * t.t())
}

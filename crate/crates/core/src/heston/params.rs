use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Heston coefficients: rate of return `r`, mean-reversion speed `kappa`,
/// long-run variance `theta`, vol-of-vol `sigma` and correlation `rho`.
/// All rates are per year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHestonParams", into = "RawHestonParams")]
pub struct HestonParams {
    r: f64,
    kappa: f64,
    theta: f64,
    sigma: f64,
    rho: f64,
    allow_feller_violation: bool,
}

#[derive(Serialize, Deserialize)]
struct RawHestonParams {
    #[serde(default)]
    r: f64,
    kappa: f64,
    theta: f64,
    sigma: f64,
    rho: f64,
    #[serde(default)]
    allow_feller_violation: bool,
}

impl TryFrom<RawHestonParams> for HestonParams {
    type Error = Error;
    fn try_from(p: RawHestonParams) -> Result<Self> {
        HestonParams::build(p.r, p.kappa, p.theta, p.sigma, p.rho, p.allow_feller_violation)
    }
}

impl From<HestonParams> for RawHestonParams {
    fn from(p: HestonParams) -> Self {
        RawHestonParams {
            r: p.r,
            kappa: p.kappa,
            theta: p.theta,
            sigma: p.sigma,
            rho: p.rho,
            allow_feller_violation: p.allow_feller_violation,
        }
    }
}

impl HestonParams {
    /// Validated parameters; fails when the Feller condition `2 kappa theta > sigma^2` does not hold.
    pub fn new(r: f64, kappa: f64, theta: f64, sigma: f64, rho: f64) -> Result<Self> {
        Self::build(r, kappa, theta, sigma, rho, false)
    }

    /// Like [`HestonParams::new`] but accepts parameters that violate the Feller condition.
    pub fn allowing_feller_violation(r: f64, kappa: f64, theta: f64, sigma: f64, rho: f64) -> Result<Self> {
        Self::build(r, kappa, theta, sigma, rho, true)
    }

    fn build(r: f64, kappa: f64, theta: f64, sigma: f64, rho: f64, allow: bool) -> Result<Self> {
        if !r.is_finite() {
            return Err(invalid("r must be finite"));
        }
        for (name, v) in [("kappa", kappa), ("theta", theta), ("sigma", sigma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(invalid(format!("rho must lie in [-1, 1], got {rho}")));
        }
        let p = HestonParams {
            r,
            kappa,
            theta,
            sigma,
            rho,
            allow_feller_violation: allow,
        };
        if !allow && !p.feller() {
            return Err(Error::FellerViolation {
                lhs: 2.0 * kappa * theta,
                rhs: sigma * sigma,
            });
        }
        Ok(p)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `2 kappa theta > sigma^2`.
    pub fn feller(&self) -> bool {
        2.0 * self.kappa * self.theta > self.sigma * self.sigma
    }

    pub fn allows_feller_violation(&self) -> bool {
        self.allow_feller_violation
    }

    /// Same model with a different correlation.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::build(self.r, self.kappa, self.theta, self.sigma, rho, self.allow_feller_violation)
    }

    /// Shape and scale of the stationary Gamma law of the variance.
    pub fn stationary_gamma(&self) -> (f64, f64) {
        let s2 = self.sigma * self.sigma;
        (2.0 * self.kappa * self.theta / s2, s2 / (2.0 * self.kappa))
    }

    /// Variance of the stationary variance law, `theta sigma^2 / (2 kappa)`.
    pub fn stationary_variance_of_variance(&self) -> f64 {
        self.theta * self.sigma * self.sigma / (2.0 * self.kappa)
    }
}

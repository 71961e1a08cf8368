use serde::{Deserialize, Serialize};

use super::HestonParams;
use crate::stats::MomentSet;
use crate::units::Horizon;

/// Marginal variance split into expected integrated variance, one quarter
/// of the variance of integrated variance, and the leverage/mean-reversion
/// interaction term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceDecomposition {
    pub horizon: Horizon,
    pub eiv: f64,
    pub viv: f64,
    pub emiv: f64,
    pub total: f64,
}

impl VarianceDecomposition {
    pub fn new(horizon: Horizon, eiv: f64, viv: f64, emiv: f64) -> Self {
        VarianceDecomposition { horizon, eiv, viv, emiv, total: eiv + viv + emiv }
    }

    /// Share of the marginal variance not explained by EIV.
    pub fn riv(&self) -> f64 {
        (self.total - self.eiv) / self.total
    }
}

/// `t + (exp(-kappa t) - 1) / kappa`, accurate for small `kappa t`.
fn relaxation(kappa: f64, t: f64) -> f64 {
    let x = kappa * t;
    if x < 1e-3 {
        // x^2/2 - x^3/6 + x^4/24 - x^5/120
        let s = x * x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0)));
        s / kappa
    } else {
        t + (-x).exp_m1() / kappa
    }
}

/// Expected integrated variance `theta t`.
pub fn eiv(p: &HestonParams, t: Horizon) -> f64 {
    p.theta() * t.t()
}

/// `-rho E[(int V ds)(int sqrt(V) dW)] = -rho theta (sigma/kappa) [t + (e^{-kappa t} - 1)/kappa]`.
pub fn emiv(p: &HestonParams, t: Horizon) -> f64 {
    -p.rho() * p.theta() * p.sigma() / p.kappa() * relaxation(p.kappa(), t.t())
}

/// `(1/4) Var[int V ds] = (1/4) theta (sigma^2/kappa^2) [t + (e^{-kappa t} - 1)/kappa]`.
pub fn viv(p: &HestonParams, t: Horizon) -> f64 {
    let s_k = p.sigma() / p.kappa();
    0.25 * p.theta() * s_k * s_k * relaxation(p.kappa(), t.t())
}

pub fn marginal_mean(p: &HestonParams, t: Horizon) -> f64 {
    (p.r() - 0.5 * p.theta()) * t.t()
}

pub fn marginal_variance(p: &HestonParams, t: Horizon) -> VarianceDecomposition {
    VarianceDecomposition::new(t, eiv(p, t), viv(p, t), emiv(p, t))
}

/// `E[(X_t - E X_t)^3]`.
pub fn third_central_moment(p: &HestonParams, t: Horizon) -> f64 {
    let (k, th, s, rho, t) = (p.kappa(), p.theta(), p.sigma(), p.rho(), t.t());
    let k2 = k * k;
    let s2 = s * s;
    let early = -4.0 * k2 + 8.0 * k * rho * s + 4.0 * t * k2 * rho * s - 2.0 * s2 - t * k * s2;
    let late = -4.0 * k2 * (t * k - 1.0) + 4.0 * k * (t * k - 2.0) * rho * s + (2.0 - t * k) * s2;
    3.0 / (8.0 * k.powi(5)) * th * s * (s - 2.0 * k * rho) * ((-k * t).exp() * early + late)
}

pub fn skewness(p: &HestonParams, t: Horizon) -> f64 {
    third_central_moment(p, t) / marginal_variance(p, t).total.powf(1.5)
}

/// `E[(X_t - E X_t)^4]`.
pub fn fourth_central_moment(p: &HestonParams, t: Horizon) -> f64 {
    let (k, th, s, rho, t) = (p.kappa(), p.theta(), p.sigma(), p.rho(), t.t());
    let r2 = rho * rho;
    let tk = t * k;
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s2 * s2;
    let s5 = s4 * s;

    let g0 = s2 * (s - 4.0 * k * rho).powi(2) * (2.0 * th * k + s2);

    let g1 = 4.0
        * s
        * (-16.0 * t * th * k.powi(5) * rho
            + 4.0 * k.powi(3) * ((2.0 + t * th) * k + 4.0 * (th * (tk - 1.0) + 2.0 * k * (2.0 + tk)) * r2) * s
            - 8.0 * k * k * rho * (th * (tk - 1.0) + 6.0 * k * (2.0 + tk) + 2.0 * k * (6.0 + tk * (4.0 + tk)) * r2) * s2
            + k * (th * (tk - 1.0) + 4.0 * k * (6.0 + 3.0 * tk + (34.0 + tk * (24.0 + 5.0 * tk)) * r2)) * s3
            - 8.0 * k * (7.0 + tk * (5.0 + tk)) * rho * s4
            + (7.0 + tk * (5.0 + tk)) * s5);

    let q = 4.0 * k * k - 4.0 * k * rho * s + s2;
    let g2 = 2.0 * t * t * th * k.powi(3) * q * q
        + 2.0 * tk * s * q * (8.0 * th * k * k * rho + 2.0 * k * (2.0 * k + 8.0 * k * r2 - th) * s - 20.0 * k * rho * s2 + 5.0 * s3)
        + s2 * (-32.0 * k.powi(4) * (1.0 + 8.0 * r2) - 29.0 * s4
            + 2.0 * k * s2 * (th + 116.0 * rho * s)
            + 32.0 * k.powi(3) * rho * (th * rho + 12.0 * (1.0 + r2) * s)
            - 16.0 * k * k * s * (6.0 * s + rho * (th + 35.0 * rho * s)));

    let e1 = (-k * t).exp();
    3.0 / (32.0 * k.powi(7)) * th * (e1 * e1 * g0 + e1 * g1 + g2)
}

/// Raw kurtosis `m4 / Var^2` (3 for a normal law).
pub fn kurtosis(p: &HestonParams, t: Horizon) -> f64 {
    let v = marginal_variance(p, t).total;
    fourth_central_moment(p, t) / (v * v)
}

/// Exact first four moments.
pub fn moment_set(p: &HestonParams, t: Horizon) -> MomentSet {
    MomentSet {
        mean: marginal_mean(p, t),
        variance: marginal_variance(p, t).total,
        skewness: skewness(p, t),
        excess_kurtosis: kurtosis(p, t) - 3.0,
        standard_errors: None,
    }
}

/// Leading-order behaviour as `t -> 0`:
/// mean `rt - theta t/2`, variance `theta t`,
/// skewness `sigma (3 rho/2 - 3 sigma/(4 kappa)) sqrt(t/theta)`,
/// kurtosis `3 + 3 sigma^2/(2 kappa theta)`.
pub fn short_horizon_moments(p: &HestonParams, t: Horizon) -> MomentSet {
    let (k, th, s, rho) = (p.kappa(), p.theta(), p.sigma(), p.rho());
    MomentSet {
        mean: marginal_mean(p, t),
        variance: th * t.t(),
        skewness: s * (1.5 * rho - 0.75 * s / k) * (t.t() / th).sqrt(),
        excess_kurtosis: 3.0 * s * s / (2.0 * k * th),
        standard_errors: None,
    }
}

/// Per-year slopes as `t -> infinity` of `E[int V]`, `E[(int V)(int sqrt(V) dW)]`
/// and `Var[int V]`. Successive slopes differ by the factor `sigma/kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongHorizonRates {
    pub integrated_variance_mean: f64,
    pub cross_moment: f64,
    pub integrated_variance_variance: f64,
}

pub fn long_horizon_asymptotics(p: &HestonParams) -> LongHorizonRates {
    let f = p.sigma() / p.kappa();
    LongHorizonRates {
        integrated_variance_mean: p.theta(),
        cross_moment: p.theta() * f,
        integrated_variance_variance: p.theta() * f * f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> HestonParams {
        HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap()
    }

    fn yr(t: f64) -> Horizon {
        Horizon::years(t).unwrap()
    }

    #[test]
    fn eiv_values() {
        assert!((eiv(&base(), yr(1.0)) - 0.04).abs() < 1e-16);
        assert!((eiv(&base(), yr(25.0 / 252.0)) - 0.003_968_253_968).abs() < 1e-12);
        assert!(eiv(&base(), yr(1e-300)) < 1e-300);
    }

    #[test]
    fn emiv_and_viv_reference_values() {
        // direct evaluation: 0.0042 * (1 + (e^-2 - 1)/2)
        assert!((emiv(&base(), yr(1.0)) - 0.002_384_204_1).abs() < 1e-10);
        assert!((viv(&base(), yr(1.0)) - 1.277_253e-4).abs() < 1e-9);
        let p0 = base().with_rho(0.0).unwrap();
        assert_eq!(emiv(&p0, yr(0.37)), 0.0);
    }

    #[test]
    fn vanishing_vol_of_vol() {
        let p = HestonParams::new(0.0, 2.0, 0.04, 1e-9, -0.7).unwrap();
        let d = marginal_variance(&p, yr(1.0));
        assert!(d.emiv.abs() < 1e-10 && d.viv.abs() < 1e-18);
        assert!((d.total - 0.04).abs() < 1e-10);
    }

    #[test]
    fn decomposition_total() {
        let d = marginal_variance(&base(), yr(1.0));
        assert!((d.total - 0.042_511_929_314_2).abs() < 1e-12);
        assert_eq!(d.total, d.eiv + d.viv + d.emiv);
        let full = marginal_variance(&base().with_rho(-1.0).unwrap(), yr(1.0));
        let none = marginal_variance(&base().with_rho(0.0).unwrap(), yr(1.0));
        assert!((full.total - none.total - full.emiv).abs() < 1e-17);
    }

    #[test]
    fn viv_short_horizon_order() {
        // VIV ~ theta sigma^2 t^2 / (8 kappa)
        let t = 1e-4;
        let v = viv(&base(), yr(t));
        let lead = 0.04 * 0.09 * t * t / 16.0;
        assert!((v / lead - 1.0).abs() < 1e-3);
    }

    #[test]
    fn marginal_mean_values() {
        let p = base();
        assert!((marginal_mean(&p, yr(1.0)) + 0.02).abs() < 1e-16);
        let p = HestonParams::new(0.05, 2.0, 0.04, 0.3, -0.7).unwrap();
        assert!((marginal_mean(&p, yr(1.0)) - 0.03).abs() < 1e-16);
    }

    #[test]
    fn higher_moments_match_cumulant_oracle() {
        // Values from cumulants of the characteristic exponent, 50-digit arithmetic.
        let h = yr(1.0);
        assert!((third_central_moment(&base(), h) + 0.008_336_667_493_83).abs() < 1e-14);
        assert!((fourth_central_moment(&base(), h) - 0.008_955_489_590_62).abs() < 1e-14);
        let p = HestonParams::new(0.0, 16.0, 0.04, 0.8, -1.0).unwrap();
        let h = yr(5.0 / 252.0);
        assert!((third_central_moment(&p, h) / -1.756_086_186_06e-5 - 1.0).abs() < 1e-9);
        assert!((fourth_central_moment(&p, h) / 3.138_931_331_53e-6 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn third_moment_vanishes_when_sigma_is_two_kappa_rho() {
        let p = HestonParams::new(0.0, 1.0, 0.04, 0.2, 0.1).unwrap();
        assert!(third_central_moment(&p, yr(0.5)).abs() < 1e-18);
    }

    #[test]
    fn short_horizon_limits() {
        let p = base();
        let s = short_horizon_moments(&p, yr(1.0 / 252.0));
        assert!((s.mean + 7.936_507_936_5e-5).abs() < 1e-12);
        assert!((s.variance - 1.587_301_587_3e-4).abs() < 1e-12);
        assert!((s.excess_kurtosis + 3.0 - 4.6875).abs() < 1e-12);
        let q = HestonParams::new(0.0, 2.0, 0.04, 0.3, 0.3 / 4.0).unwrap();
        assert!(short_horizon_moments(&q, yr(0.01)).skewness.abs() < 1e-16);
    }

    #[test]
    fn long_horizon_rates() {
        let r = long_horizon_asymptotics(&base());
        assert!((r.integrated_variance_mean - 0.04).abs() < 1e-16);
        assert!((r.cross_moment - 0.006).abs() < 1e-16);
        assert!((r.integrated_variance_variance - 0.0009).abs() < 1e-16);
        assert!((r.integrated_variance_variance / r.cross_moment - 0.15).abs() < 1e-14);
    }

    #[test]
    fn emiv_monotone_in_t_and_leverage() {
        let p = base();
        let mut prev = 0.0;
        for d in 1..=252 {
            let e = emiv(&p, yr(d as f64 / 252.0));
            assert!(e > prev);
            prev = e;
        }
        let a = emiv(&p.with_rho(-0.3).unwrap(), yr(0.5));
        let b = emiv(&p.with_rho(-0.9).unwrap(), yr(0.5));
        assert!(b > a);
    }
}

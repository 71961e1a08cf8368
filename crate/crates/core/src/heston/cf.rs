use num_complex::Complex64;
use std::f64::consts::{LN_2, PI, TAU};

use super::HestonParams;
use crate::error::{Error, Result};
use crate::units::Horizon;

/// Largest phase change of the logarithm's argument accepted between two
/// evaluation points before the step is halved.
const MAX_PHASE_STEP: f64 = PI / 4.0;
const MAX_HALVINGS: u32 = 48;

/// Pieces of `F_t(p)`: the log bracket is rewritten as
/// `Omega t/2 - ln 2 + ln[(1 + A) + (1 - A) e^{-Omega t}]` with
/// `A = (Omega^2 - Gamma^2 + 2 kappa Gamma) / (2 kappa Omega)`, so only the
/// last logarithm needs branch tracking.
#[inline]
fn pieces(p: &HestonParams, t: f64, px: f64) -> (Complex64, Complex64, Complex64) {
    let (k, s, rho) = (p.kappa(), p.sigma(), p.rho());
    let gamma = Complex64::new(k, rho * s * px);
    // Re(Omega^2) = kappa^2 + (1 - rho^2) sigma^2 px^2 > 0, so the principal
    // square root is continuous in px.
    let omega2 = gamma * gamma + Complex64::new(s * s * px * px, -s * s * px);
    let omega = omega2.sqrt();
    let a = (omega2 - gamma * gamma + 2.0 * k * gamma) / (2.0 * k * omega);
    let w = (1.0 + a) + (1.0 - a) * (-omega * t).exp();
    (gamma, omega, w)
}

/// Evaluates `F_t(p)` along a monotone sequence of frequencies, keeping the
/// complex logarithm on the branch continuously connected to `p = 0`.
pub struct ExponentWalker<'a> {
    params: &'a HestonParams,
    t: f64,
    px: f64,
    phase: f64,
}

impl<'a> ExponentWalker<'a> {
    pub fn new(params: &'a HestonParams, t: Horizon) -> Self {
        // At p = 0, Gamma = Omega = kappa and the tracked argument equals 2.
        ExponentWalker {
            params,
            t: t.t(),
            px: 0.0,
            phase: 0.0,
        }
    }

    pub fn position(&self) -> f64 {
        self.px
    }

    /// Moves to `px` and returns `F_t(px)`.
    pub fn advance(&mut self, px: f64) -> Result<Complex64> {
        self.step_to(px, 0)
    }

    fn step_to(&mut self, px: f64, depth: u32) -> Result<Complex64> {
        let (gamma, omega, w) = pieces(self.params, self.t, px);
        if !(w.re.is_finite() && w.im.is_finite()) || w.norm() == 0.0 {
            return Err(Error::BranchTracking { at: px });
        }
        let mut d = w.arg() - self.phase;
        d -= TAU * (d / TAU).round();
        if d.abs() > MAX_PHASE_STEP {
            if depth >= MAX_HALVINGS {
                return Err(Error::BranchTracking { at: px });
            }
            let mid = 0.5 * (self.px + px);
            self.step_to(mid, depth + 1)?;
            return self.step_to(px, depth + 1);
        }
        self.phase += d;
        self.px = px;
        let log_w = Complex64::new(w.norm().ln(), self.phase);
        let p = self.params;
        let c = p.kappa() * p.theta() / (p.sigma() * p.sigma());
        Ok(c * gamma * self.t - 2.0 * c * (omega * (0.5 * self.t) - LN_2 + log_w))
    }
}

/// `F_t(p)` with `P_t(x) = (1/2pi) ∫ exp(i p x + F_t(p)) dp` the density of
/// `X_t - r t`. The branch is continued from `p = 0` along the real axis.
pub fn characteristic_exponent(p: &HestonParams, t: Horizon, px: f64) -> Result<Complex64> {
    let mut walker = ExponentWalker::new(p, t);
    if px == 0.0 {
        return walker.advance(0.0);
    }
    let steps = (px.abs() / 2.0).ceil().max(1.0) as usize;
    let mut out = Complex64::new(0.0, 0.0);
    for i in 1..=steps {
        out = walker.advance(px * i as f64 / steps as f64)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yr(t: f64) -> Horizon {
        Horizon::years(t).unwrap()
    }

    #[test]
    fn zero_at_origin() {
        let p = HestonParams::new(0.0, 3.0, 0.04, 0.4, -0.5).unwrap();
        let f = characteristic_exponent(&p, yr(0.7), 0.0).unwrap();
        assert!(f.norm() < 1e-15);
    }

    #[test]
    fn conjugate_symmetry() {
        let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
        for &px in &[0.5, 3.0, 17.0, 120.0] {
            let a = characteristic_exponent(&p, yr(1.0), px).unwrap();
            let b = characteristic_exponent(&p, yr(1.0), -px).unwrap();
            assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn arbitrary_precision_reference() {
        // mpmath at 50 digits
        let p = HestonParams::new(0.0, 16.0, 0.04, 0.8, -1.0).unwrap();
        let f = characteristic_exponent(&p, yr(5.0 / 252.0), 10.0).unwrap();
        assert!((f.re + 0.039_470_605_385_743_698).abs() < 1e-10);
        assert!((f.im - 0.001_101_347_600_271_679).abs() < 1e-10);

        let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
        let f = characteristic_exponent(&p, yr(1.0), -37.5).unwrap();
        assert!((f.re + 7.418_420_477_240_585).abs() < 1e-10);
        // continuous branch: the imaginary part is not reduced modulo 2 pi
        assert!((f.im - 5.156_344_477_362_298_6).abs() < 1e-10);
    }

    #[test]
    fn small_frequency_matches_mean() {
        // F(p) ≈ -i p E[X - rt] for small p
        let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
        let h = 1e-6;
        let f = characteristic_exponent(&p, yr(1.0), h).unwrap();
        assert!((f.im / -h - (-0.02)).abs() < 1e-6);
    }
}

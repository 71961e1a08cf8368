//! Variance processes driving the stochastic-volatility simulator.

use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::dist::GigParams;
use crate::error::{invalid, Error, Result};
use crate::heston::HestonParams;
use crate::rng::StreamRng;

/// Pathwise quantities accumulated over one simulated variance path.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathIntegrals {
    /// Terminal variance, truncated at zero.
    pub v_terminal: f64,
    /// Raw scheme state at the end, for continuing the path.
    pub state: f64,
    /// `∫ V ds`
    pub int_var: f64,
    /// `∫ sqrt(V) dW`
    pub stoch_int: f64,
}

/// A variance process `dV = a(V) dt + b(V) dW` with a discretization scheme.
pub trait VarianceModel: Send + Sync {
    fn name(&self) -> &'static str;

    /// Runs `n_steps` steps of size `dt` from `v0`, drawing increments from `rng`.
    fn integrate(&self, v0: f64, n_steps: usize, dt: f64, rng: &mut StreamRng) -> Result<PathIntegrals>;

    /// Integrates several independent paths, one stream each. Implementations
    /// may interleave the paths, but each path must come out exactly as
    /// [`VarianceModel::integrate`] would produce it.
    fn integrate_lanes(
        &self,
        v0: &[f64],
        n_steps: usize,
        dt: f64,
        rngs: &mut [StreamRng],
    ) -> Result<Vec<PathIntegrals>> {
        v0.iter().zip(rngs.iter_mut()).map(|(&v, r)| self.integrate(v, n_steps, dt, r)).collect()
    }

    fn sample_stationary(&self, rng: &mut StreamRng) -> f64;

    fn stationary_mean(&self) -> f64;

    /// Checks a fixed starting value.
    fn validate_v0(&self, v0: f64) -> Result<()> {
        if v0.is_finite() && v0 >= 0.0 {
            Ok(())
        } else {
            Err(invalid(format!("v0 must be finite and non-negative, got {v0}")))
        }
    }
}

/// CIR variance `dV = kappa (theta - V) dt + sigma sqrt(V) dW` under
/// full-truncation Euler: the negative part is removed inside drift and
/// diffusion only, the state itself may dip below zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirModel {
    kappa: f64,
    theta: f64,
    sigma: f64,
    stationary: Gamma<f64>,
}

impl CirModel {
    pub fn new(p: &HestonParams) -> Self {
        let (shape, scale) = p.stationary_gamma();
        CirModel {
            kappa: p.kappa(),
            theta: p.theta(),
            sigma: p.sigma(),
            stationary: Gamma::new(shape, scale).expect("positive Heston parameters"),
        }
    }
}

impl VarianceModel for CirModel {
    fn name(&self) -> &'static str {
        "cir"
    }

    fn integrate(&self, v0: f64, n_steps: usize, dt: f64, rng: &mut StreamRng) -> Result<PathIntegrals> {
        let sqdt = dt.sqrt();
        let (k, th, s) = (self.kappa, self.theta, self.sigma);
        let mut v = v0;
        let mut iv = 0.0;
        let mut si = 0.0;
        for _ in 0..n_steps {
            let z: f64 = StandardNormal.sample(rng);
            let vp = v.max(0.0);
            let sq = vp.sqrt();
            let dw = sqdt * z;
            si += sq * dw;
            v += k * (th - vp) * dt + s * sq * dw;
            iv += 0.5 * (vp + v.max(0.0)) * dt;
        }
        Ok(PathIntegrals { v_terminal: v.max(0.0), state: v, int_var: iv, stoch_int: si })
    }

    fn integrate_lanes(
        &self,
        v0: &[f64],
        n_steps: usize,
        dt: f64,
        rngs: &mut [StreamRng],
    ) -> Result<Vec<PathIntegrals>> {
        let sqdt = dt.sqrt();
        let (k, th, s) = (self.kappa, self.theta, self.sigma);
        let mut v = v0.to_vec();
        let mut iv = vec![0.0; v0.len()];
        let mut si = vec![0.0; v0.len()];
        for _ in 0..n_steps {
            for j in 0..v.len() {
                let z: f64 = StandardNormal.sample(&mut rngs[j]);
                let vp = v[j].max(0.0);
                let sq = vp.sqrt();
                let dw = sqdt * z;
                si[j] += sq * dw;
                v[j] += k * (th - vp) * dt + s * sq * dw;
                iv[j] += 0.5 * (vp + v[j].max(0.0)) * dt;
            }
        }
        Ok((0..v.len())
            .map(|j| PathIntegrals { v_terminal: v[j].max(0.0), state: v[j], int_var: iv[j], stoch_int: si[j] })
            .collect())
    }

    fn sample_stationary(&self, rng: &mut StreamRng) -> f64 {
        self.stationary.sample(rng)
    }

    fn stationary_mean(&self) -> f64 {
        self.theta
    }
}

pub const MAX_HALVINGS: u32 = 30;

/// Parameters of the diffusion
/// `dV = (b1 V^{2a-1} - b2 V^{2a} + b3 V^{2(a-1)}) dt + k V^a dW` whose
/// stationary law is `GIG(lambda, delta, gamma)`, with
/// `b1 = k^2 (lambda - 1)/2 + k^2 a`, `b2 = (k gamma)^2/4`, `b3 = (k delta)^2/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSorensen", into = "RawSorensen")]
pub struct SorensenParams {
    alpha_exp: f64,
    gig: GigParams,
    kdiff: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSorensen {
    alpha_exp: f64,
    lambda: f64,
    delta: f64,
    gamma: f64,
    kdiff: f64,
}

impl TryFrom<RawSorensen> for SorensenParams {
    type Error = Error;
    fn try_from(r: RawSorensen) -> Result<Self> {
        SorensenParams::new(r.alpha_exp, r.lambda, r.delta, r.gamma, r.kdiff)
    }
}

impl From<SorensenParams> for RawSorensen {
    fn from(p: SorensenParams) -> Self {
        RawSorensen {
            alpha_exp: p.alpha_exp,
            lambda: p.gig.lambda(),
            delta: p.gig.delta(),
            gamma: p.gig.gamma(),
            kdiff: p.kdiff,
        }
    }
}

impl SorensenParams {
    pub fn new(alpha_exp: f64, lambda: f64, delta: f64, gamma: f64, kdiff: f64) -> Result<Self> {
        let gig = GigParams::new(lambda, delta, gamma)?;
        if !(kdiff.is_finite() && kdiff > 0.0) {
            return Err(invalid(format!("kdiff must be positive, got {kdiff}")));
        }
        if !(alpha_exp.is_finite() && alpha_exp > 0.0) {
            return Err(invalid(format!("alpha_exp must be positive, got {alpha_exp}")));
        }
        Ok(SorensenParams { alpha_exp, gig, kdiff })
    }

    pub fn alpha_exp(&self) -> f64 {
        self.alpha_exp
    }
    pub fn kdiff(&self) -> f64 {
        self.kdiff
    }
    pub fn stationary_law(&self) -> GigParams {
        self.gig
    }

    /// `(b1, b2, b3)`
    pub fn drift_coefficients(&self) -> (f64, f64, f64) {
        let k2 = self.kdiff * self.kdiff;
        (
            0.5 * k2 * (self.gig.lambda() - 1.0) + k2 * self.alpha_exp,
            0.25 * k2 * self.gig.gamma().powi(2),
            0.25 * k2 * self.gig.delta().powi(2),
        )
    }
}

/// Euler scheme for the GIG diffusion. A step that would leave `(0, ∞)` is
/// split in two with a Brownian-bridge midpoint, recursively.
#[derive(Debug, Clone)]
pub struct SorensenModel {
    params: SorensenParams,
    b: (f64, f64, f64),
}

impl SorensenModel {
    pub fn new(params: SorensenParams) -> Self {
        SorensenModel { b: params.drift_coefficients(), params }
    }

    fn drift(&self, v: f64) -> f64 {
        let (b1, b2, b3) = self.b;
        let a = self.params.alpha_exp;
        if a == 0.5 {
            b1 - b2 * v + b3 / v
        } else {
            let p = v.powf(2.0 * a - 2.0);
            p * (b1 * v - b2 * v * v + b3)
        }
    }

    fn diffusion(&self, v: f64) -> f64 {
        let a = self.params.alpha_exp;
        self.params.kdiff * if a == 0.5 { v.sqrt() } else { v.powf(a) }
    }

    fn step(&self, v: f64, dt: f64, dw: f64, depth: u32, rng: &mut StreamRng, acc: &mut PathIntegrals) -> Result<f64> {
        let next = v + self.drift(v) * dt + self.diffusion(v) * dw;
        if next > 0.0 && next.is_finite() {
            acc.int_var += 0.5 * (v + next) * dt;
            acc.stoch_int += v.sqrt() * dw;
            return Ok(next);
        }
        if depth == MAX_HALVINGS {
            return Err(Error::StepSize { v, halvings: depth });
        }
        let z: f64 = StandardNormal.sample(rng);
        let dw1 = 0.5 * dw + 0.5 * dt.sqrt() * z;
        let mid = self.step(v, 0.5 * dt, dw1, depth + 1, rng, acc)?;
        self.step(mid, 0.5 * dt, dw - dw1, depth + 1, rng, acc)
    }
}

impl VarianceModel for SorensenModel {
    fn name(&self) -> &'static str {
        "sorensen"
    }

    fn integrate(&self, v0: f64, n_steps: usize, dt: f64, rng: &mut StreamRng) -> Result<PathIntegrals> {
        let sqdt = dt.sqrt();
        let mut acc = PathIntegrals::default();
        let mut v = v0;
        for _ in 0..n_steps {
            let z: f64 = StandardNormal.sample(rng);
            v = self.step(v, dt, sqdt * z, 0, rng, &mut acc)?;
        }
        acc.v_terminal = v;
        acc.state = v;
        Ok(acc)
    }

    fn sample_stationary(&self, rng: &mut StreamRng) -> f64 {
        self.params.gig.sample(rng)
    }

    fn stationary_mean(&self) -> f64 {
        self.params.gig.mean()
    }

    fn validate_v0(&self, v0: f64) -> Result<()> {
        if v0.is_finite() && v0 > 0.0 {
            Ok(())
        } else {
            Err(invalid(format!("the GIG diffusion needs v0 > 0, got {v0}")))
        }
    }
}

pub type ModelBuilder = fn(&serde_json::Value) -> Result<Box<dyn VarianceModel>>;

/// Variance models addressable by name, built from JSON parameter objects.
pub struct ModelRegistry {
    builders: BTreeMap<&'static str, ModelBuilder>,
}

/// `rho` does not enter the variance dynamics and may be omitted.
fn build_cir(v: &serde_json::Value) -> Result<Box<dyn VarianceModel>> {
    let mut v = v.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.entry("rho").or_insert(serde_json::Value::from(0.0));
    }
    let p: HestonParams = serde_json::from_value(v).map_err(|e| invalid(format!("cir parameters: {e}")))?;
    Ok(Box::new(CirModel::new(&p)))
}

fn build_sorensen(v: &serde_json::Value) -> Result<Box<dyn VarianceModel>> {
    let p: SorensenParams = serde_json::from_value(v.clone()).map_err(|e| invalid(format!("sorensen parameters: {e}")))?;
    Ok(Box::new(SorensenModel::new(p)))
}

impl Default for ModelRegistry {
    fn default() -> Self {
        let mut r = ModelRegistry { builders: BTreeMap::new() };
        r.register("cir", build_cir);
        r.register("sorensen", build_sorensen);
        r
    }
}

impl ModelRegistry {
    pub fn register(&mut self, name: &'static str, builder: ModelBuilder) {
        self.builders.insert(name, builder);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, name: &str, params: &serde_json::Value) -> Result<Box<dyn VarianceModel>> {
        let b = self.builders.get(name).ok_or_else(|| {
            invalid(format!(
                "unknown variance model '{name}' (known: {})",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        b(params)
    }
}

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use super::config::{SimConfig, V0Mode};
use super::models::{CirModel, PathIntegrals, SorensenModel, SorensenParams, VarianceModel};
use crate::error::{invalid, Error, Result};
use crate::heston::HestonParams;
use crate::rng::stream_rng;
use crate::stats::{mean_estimate, sample_moments, Estimate, MomentSet};

/// Per-path terminal quantities of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    /// Terminal log returns; empty for variance-only runs.
    pub x: Vec<f64>,
    pub v_terminal: Vec<f64>,
    pub int_var: Vec<f64>,
    pub stoch_int: Vec<f64>,
    pub config: SimConfig,
    pub model: &'static str,
}

/// Log-return dynamics layered on a variance model:
/// `dX = (r - V/2) dt + rho sqrt(V) dW + sqrt(1 - rho^2) sqrt(V) dB`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnDynamics {
    pub r: f64,
    pub rho: f64,
}

/// Paths integrated together by [`VarianceModel::integrate_lanes`].
const LANES: usize = 8;

/// Simulates `cfg.n_paths()` independent paths; path `i` uses stream `i` of `cfg.seed()`.
///
/// Given the variance path, the `B`-integral is exactly `N(0, ∫V ds)`, so it
/// is drawn once per path instead of once per step.
pub fn simulate_svm(
    model: &dyn VarianceModel,
    dynamics: Option<ReturnDynamics>,
    v0: V0Mode,
    cfg: &SimConfig,
) -> Result<PathBundle> {
    if let V0Mode::Fixed(v) = v0 {
        model.validate_v0(v)?;
    }
    if let Some(d) = dynamics {
        if !(d.rho.abs() <= 1.0) || !d.r.is_finite() {
            return Err(invalid("return dynamics need finite r and |rho| <= 1"));
        }
    }
    let n = cfg.n_steps();
    let dt = cfg.dt();
    let t = cfg.horizon().t();
    let chunks: Vec<Result<Vec<(Option<f64>, [f64; 3])>>> = (0..cfg.n_paths())
        .collect::<Vec<_>>()
        .par_chunks(LANES)
        .map(|idx| {
            let mut rngs: Vec<_> = idx.iter().map(|&i| stream_rng(cfg.seed(), i as u64)).collect();
            let starts: Vec<f64> = rngs
                .iter_mut()
                .map(|rng| match v0 {
                    V0Mode::Stationary => model.sample_stationary(rng),
                    V0Mode::Fixed(v) => v,
                })
                .collect();
            let ends = model.integrate_lanes(&starts, n, dt, &mut rngs)?;
            Ok(ends
                .into_iter()
                .zip(rngs.iter_mut())
                .map(|(PathIntegrals { v_terminal, int_var, stoch_int, .. }, rng)| {
                    let x = dynamics.map(|d| {
                        let z: f64 = StandardNormal.sample(rng);
                        d.r * t - 0.5 * int_var + d.rho * stoch_int + ((1.0 - d.rho * d.rho) * int_var).sqrt() * z
                    });
                    (x, [v_terminal, int_var, stoch_int])
                })
                .collect())
        })
        .collect();
    let rows = chunks.into_iter().collect::<Result<Vec<_>>>()?.concat();
    let mut b = PathBundle {
        x: Vec::with_capacity(rows.len()),
        v_terminal: Vec::with_capacity(rows.len()),
        int_var: Vec::with_capacity(rows.len()),
        stoch_int: Vec::with_capacity(rows.len()),
        config: *cfg,
        model: model.name(),
    };
    for (x, [v, iv, si]) in rows {
        if let Some(x) = x {
            b.x.push(x);
        }
        b.v_terminal.push(v);
        b.int_var.push(iv);
        b.stoch_int.push(si);
    }
    Ok(b)
}

pub fn simulate_heston(p: &HestonParams, v0: V0Mode, cfg: &SimConfig) -> Result<PathBundle> {
    simulate_svm(&CirModel::new(p), Some(ReturnDynamics { r: p.r(), rho: p.rho() }), v0, cfg)
}

/// Variance paths only; `x` is empty.
pub fn simulate_cir(p: &HestonParams, v0: V0Mode, cfg: &SimConfig) -> Result<PathBundle> {
    simulate_svm(&CirModel::new(p), None, v0, cfg)
}

/// Variance paths only; `x` is empty.
pub fn simulate_sorensen(sp: &SorensenParams, v0: V0Mode, cfg: &SimConfig) -> Result<PathBundle> {
    simulate_svm(&SorensenModel::new(*sp), None, v0, cfg)
}

/// A single long Heston path sampled at daily resolution: returns the
/// `n_days` daily log returns, started from the stationary variance law.
pub fn simulate_heston_daily(p: &HestonParams, n_days: usize, steps_per_day: u32, seed: u64) -> Result<Vec<f64>> {
    if n_days == 0 || steps_per_day == 0 {
        return Err(invalid("n_days and steps_per_day must be positive"));
    }
    let model = CirModel::new(p);
    let dt = 1.0 / (crate::TRADING_DAYS_PER_YEAR * steps_per_day as f64);
    let mut rng = stream_rng(seed, 0);
    let mut v = model.sample_stationary(&mut rng);
    let cor = (1.0 - p.rho() * p.rho()).sqrt();
    let mut out = Vec::with_capacity(n_days);
    for _ in 0..n_days {
        let day = model.integrate(v, steps_per_day as usize, dt, &mut rng)?;
        let z: f64 = StandardNormal.sample(&mut rng);
        let x = p.r() * dt * steps_per_day as f64 - 0.5 * day.int_var
            + p.rho() * day.stoch_int
            + cor * day.int_var.sqrt() * z;
        out.push(x);
        v = day.state;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSummary {
    pub model: String,
    pub n_paths: usize,
    pub n_steps: usize,
    pub horizon: f64,
    pub seed: u64,
    /// Moments of `X_t`; absent for variance-only runs.
    pub x: Option<MomentSet>,
    pub v_terminal: Estimate,
    pub int_var: Estimate,
    pub stoch_int: Estimate,
}

impl PathBundle {
    pub fn len(&self) -> usize {
        self.v_terminal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_terminal.is_empty()
    }

    pub fn has_returns(&self) -> bool {
        !self.x.is_empty()
    }

    pub fn summary(&self) -> Result<BundleSummary> {
        let x = if self.has_returns() { Some(sample_moments(&self.x)?.to_moment_set()) } else { None };
        Ok(BundleSummary {
            model: self.model.to_string(),
            n_paths: self.len(),
            n_steps: self.config.n_steps(),
            horizon: self.config.horizon().t(),
            seed: self.config.seed(),
            x,
            v_terminal: mean_estimate(&self.v_terminal)?,
            int_var: mean_estimate(&self.int_var)?,
            stoch_int: mean_estimate(&self.stoch_int)?,
        })
    }

    /// Raw paths as little-endian `f64`, one row of
    /// `[x, v_terminal, int_var, stoch_int]` per path, no header. `x` is NaN
    /// for variance-only runs.
    pub fn write_raw(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(f);
        for i in 0..self.len() {
            let x = self.x.get(i).copied().unwrap_or(f64::NAN);
            for v in [x, self.v_terminal[i], self.int_var[i], self.stoch_int[i]] {
                w.write_all(&v.to_le_bytes()).map_err(|e| Error::io(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_raw(path: &Path) -> Result<Vec<[f64; 4]>> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.len() % 32 != 0 {
            return Err(Error::Data(format!("{} is not a whole number of 32-byte rows", path.display())));
        }
        Ok(bytes
            .chunks_exact(32)
            .map(|row| {
                let mut r = [0.0; 4];
                for (k, c) in row.chunks_exact(8).enumerate() {
                    r[k] = f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
                }
                r
            })
            .collect())
    }
}

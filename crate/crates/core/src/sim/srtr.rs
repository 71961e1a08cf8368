//! Square-root-of-time rule against simulated conditional variances.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};

use super::config::SimConfig;
use super::oracles::{conditional_variance, srtr_prediction};
use crate::error::{invalid, Result};
use crate::heston::HestonParams;
use crate::rng::derive_seed;
use crate::stats::Estimate;
use crate::units::Horizon;

pub const DEFAULT_V0_POINTS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrtrRow {
    pub v0: f64,
    pub srtr: f64,
    pub mc: Estimate,
    /// Stationary probability of the cell around `v0`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrtrComparison {
    pub params: HestonParams,
    pub horizon: Horizon,
    pub n_paths: usize,
    pub seed: u64,
    pub rows: Vec<SrtrRow>,
    /// Least-squares slope of the simulated curve in `v0`, divided by `t`.
    pub slope_ratio: Estimate,
    /// Stationary-weighted mean of `mc - srtr`; positive when the rule under-predicts.
    pub mean_gap: Estimate,
}

fn stationary_law(p: &HestonParams) -> Result<Gamma> {
    let (shape, scale) = p.stationary_gamma();
    Gamma::new(shape, 1.0 / scale).map_err(|e| invalid(format!("stationary law: {e}")))
}

/// Stationary quantiles at probabilities `(k + 1/2) / n`.
pub fn default_v0_grid(p: &HestonParams, n: usize) -> Result<Vec<f64>> {
    let g = stationary_law(p)?;
    Ok((0..n.max(1)).map(|k| g.inverse_cdf((k as f64 + 0.5) / n.max(1) as f64)).collect())
}

/// Runs one fixed-start simulation per grid point; point `k` uses seed
/// `derive_seed(cfg.seed(), k)`.
pub fn srtr_comparison(p: &HestonParams, t: Horizon, v0_grid: &[f64], cfg: &SimConfig) -> Result<SrtrComparison> {
    if v0_grid.len() < 2 {
        return Err(invalid("v0 grid needs at least two points"));
    }
    if v0_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("v0 grid must be strictly increasing"));
    }
    let law = stationary_law(p)?;
    let n = v0_grid.len();
    let mut rows = Vec::with_capacity(n);
    for (k, &v0) in v0_grid.iter().enumerate() {
        let srtr = srtr_prediction(v0, t)?;
        let run = cfg.with_seed(derive_seed(cfg.seed(), k as u64));
        let mc = conditional_variance(p, v0, t, &run)?;
        let lo = if k == 0 { 0.0 } else { law.cdf(0.5 * (v0_grid[k - 1] + v0)) };
        let hi = if k + 1 == n { 1.0 } else { law.cdf(0.5 * (v0 + v0_grid[k + 1])) };
        rows.push(SrtrRow { v0, srtr, mc, weight: hi - lo });
    }

    let vbar = v0_grid.iter().sum::<f64>() / n as f64;
    let sxx: f64 = v0_grid.iter().map(|v| (v - vbar).powi(2)).sum();
    let combine = |coef: &dyn Fn(usize) -> f64, f: &dyn Fn(&SrtrRow) -> f64| {
        let value = (0..n).map(|k| coef(k) * f(&rows[k])).sum::<f64>();
        let se = (0..n).map(|k| (coef(k) * rows[k].mc.se).powi(2)).sum::<f64>().sqrt();
        Estimate { value, se }
    };
    let slope_ratio = combine(&|k| (v0_grid[k] - vbar) / sxx / t.t(), &|r| r.mc.value);
    let wsum: f64 = rows.iter().map(|r| r.weight).sum();
    let mean_gap = combine(&|k| rows[k].weight / wsum, &|r| r.mc.value - r.srtr);

    Ok(SrtrComparison {
        params: *p,
        horizon: t,
        n_paths: cfg.n_paths(),
        seed: cfg.seed(),
        rows,
        slope_ratio,
        mean_gap,
    })
}

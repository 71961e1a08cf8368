use serde::{Deserialize, Serialize};

use super::{marginal_density, marginal_mean, marginal_variance, HestonParams};
use crate::error::{invalid, Result};
use crate::units::Horizon;

/// Marginal densities of one model under several correlations, on a shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityComparison {
    pub horizon: Horizon,
    pub rhos: Vec<f64>,
    pub grid: Vec<f64>,
    /// `densities[k][i]` is the density for `rhos[k]` at `grid[i]`.
    pub densities: Vec<Vec<f64>>,
    pub width_sd: f64,
}

impl DensityComparison {
    pub fn peak(&self) -> f64 {
        self.densities.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Largest pointwise gap between the first and last curve, relative to the tallest peak.
    pub fn relative_gap(&self) -> f64 {
        let (a, b) = (&self.densities[0], &self.densities[self.densities.len() - 1]);
        let gap = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        gap / self.peak()
    }
}

/// Evaluates the density for each `rho` on `n` points spanning the widest of
/// the curves' mean ± `width_sd` sd ranges.
pub fn compare_densities(
    base: &HestonParams,
    rhos: &[f64],
    t: Horizon,
    n: usize,
    width_sd: f64,
) -> Result<DensityComparison> {
    if rhos.is_empty() {
        return Err(invalid("need at least one correlation"));
    }
    if n < 2 || !(width_sd.is_finite() && width_sd > 0.0) {
        return Err(invalid("grid needs at least two points and a positive width"));
    }
    let models = rhos.iter().map(|&r| base.with_rho(r)).collect::<Result<Vec<_>>>()?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &models {
        let m = marginal_mean(p, t);
        let sd = marginal_variance(p, t).total.sqrt();
        lo = lo.min(m - width_sd * sd);
        hi = hi.max(m + width_sd * sd);
    }
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let densities = models
        .iter()
        .map(|p| marginal_density(p, t, &grid).map(|c| c.values))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityComparison { horizon: t, rhos: rhos.to_vec(), grid, densities, width_sd })
}

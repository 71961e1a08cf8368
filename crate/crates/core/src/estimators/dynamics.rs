//! Horizon scaling of the marginal variance and the RIV ratio.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{annualize, prefix_sums, window_variance, AggregationMode};
use crate::error::{invalid, Error, Result};
use crate::rng::stream_rng;

pub const MIN_WINDOWS: usize = 30;

/// Moving-block bootstrap settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub block: usize,
    pub resamples: usize,
    /// Two-sided coverage of the reported intervals.
    pub confidence: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { block: 25, resamples: 1000, confidence: 0.95, seed: 0 }
    }
}

impl BootstrapConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.block == 0 || self.resamples < 2 {
            return Err(invalid("bootstrap needs block >= 1 and at least 2 resamples"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(invalid(format!("confidence must lie in (0, 1), got {}", self.confidence)));
        }
        Ok(())
    }
}

/// Bootstrap half-widths per horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsCi {
    pub var_hat: Vec<f64>,
    pub emiv_hat: Vec<f64>,
    pub riv: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceDynamics {
    pub horizons: Vec<usize>,
    pub ref_horizon: usize,
    pub mode: AggregationMode,
    pub var_hat: Vec<f64>,
    /// `(t/s) var_hat(s)`
    pub eiv_hat: Vec<f64>,
    pub emiv_hat: Vec<f64>,
    pub riv: Vec<f64>,
    pub ci: DynamicsCi,
    pub bootstrap: BootstrapConfig,
    pub n_obs: usize,
}

/// One row of the horizon-scaling figure data, annualized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub horizon_days: usize,
    pub var_annualized: f64,
    pub eiv_annualized: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl VarianceDynamics {
    pub fn index_of(&self, h: usize) -> Option<usize> {
        self.horizons.iter().position(|&x| x == h)
    }

    pub fn figure_rows(&self) -> Vec<FigureRow> {
        self.horizons
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let hd = h as f64;
                FigureRow {
                    horizon_days: h,
                    var_annualized: annualize(self.var_hat[i], hd),
                    eiv_annualized: annualize(self.eiv_hat[i], hd),
                    ci_lo: annualize(self.var_hat[i] - self.ci.var_hat[i], hd),
                    ci_hi: annualize(self.var_hat[i] + self.ci.var_hat[i], hd),
                }
            })
            .collect()
    }

    /// Whether `target` lies in the RIV interval at horizon `h`.
    pub fn riv_covers(&self, h: usize, target: f64) -> Option<bool> {
        let i = self.index_of(h)?;
        Some((self.riv[i] - target).abs() <= self.ci.riv[i])
    }
}

struct PointEstimates {
    var: Vec<f64>,
    eiv: Vec<f64>,
    emiv: Vec<f64>,
    riv: Vec<f64>,
}

fn point_estimates(r: &[f64], horizons: &[usize], ref_idx: usize, mode: AggregationMode) -> PointEstimates {
    let p = prefix_sums(r);
    let var: Vec<f64> = horizons.iter().map(|&h| window_variance(&p, h, mode)).collect();
    let s = horizons[ref_idx] as f64;
    let eiv: Vec<f64> = horizons.iter().map(|&h| h as f64 / s * var[ref_idx]).collect();
    let emiv: Vec<f64> = var.iter().zip(&eiv).map(|(v, e)| v - e).collect();
    let mut riv: Vec<f64> = emiv.iter().zip(&var).map(|(e, v)| e / v).collect();
    riv[ref_idx] = 0.0;
    PointEstimates { var, eiv, emiv, riv }
}

/// Moving-block resample of `r`: blocks of `block` consecutive returns with
/// uniformly drawn starts, concatenated and cut to the original length.
fn block_resample<R: Rng>(r: &[f64], block: usize, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    let n = r.len();
    let block = block.min(n);
    while out.len() < n {
        let start = rng.random_range(0..=n - block);
        let take = block.min(n - out.len());
        out.extend_from_slice(&r[start..start + take]);
    }
}

/// Half-width of the central percentile interval.
fn half_width(mut xs: Vec<f64>, confidence: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let a = 0.5 * (1.0 - confidence);
    let q = |p: f64| {
        let h = (xs.len() - 1) as f64 * p;
        let k = h.floor() as usize;
        let f = h - k as f64;
        if k + 1 < xs.len() { xs[k] + f * (xs[k + 1] - xs[k]) } else { xs[k] }
    };
    0.5 * (q(1.0 - a) - q(a))
}

/// Estimates `Var[X_t]`, the EIV baseline `(t/s) Var[X_s]`, their difference
/// and `RIV_t = (Var[X_t] - EIV_t) / Var[X_t]` with moving-block bootstrap
/// half-widths. Resample `b` draws from stream `b` of `boot.seed`.
pub fn variance_dynamics(
    returns: &[f64],
    horizons: &[usize],
    ref_horizon: usize,
    mode: AggregationMode,
    boot: &BootstrapConfig,
) -> Result<VarianceDynamics> {
    boot.validate()?;
    if horizons.is_empty() || horizons.contains(&0) {
        return Err(invalid("horizons must be a non-empty list of positive day counts"));
    }
    let mut hs = horizons.to_vec();
    hs.sort_unstable();
    hs.dedup();
    let ref_idx = hs
        .iter()
        .position(|&h| h == ref_horizon)
        .ok_or_else(|| invalid(format!("reference horizon {ref_horizon} is not among the horizons")))?;
    let h_max = *hs.last().expect("non-empty");
    let windows = returns.len() / h_max;
    if windows < MIN_WINDOWS {
        return Err(Error::InsufficientData(format!(
            "{} returns give {windows} non-overlapping {h_max}-day windows (< {MIN_WINDOWS})",
            returns.len()
        )));
    }
    if let Some(i) = returns.iter().position(|x| !x.is_finite()) {
        return Err(Error::Data(format!("non-finite return at position {i}")));
    }
    let est = point_estimates(returns, &hs, ref_idx, mode);
    if est.var.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Degenerate("zero variance at some horizon".into()));
    }

    let reps: Vec<PointEstimates> = (0..boot.resamples)
        .into_par_iter()
        .map_init(Vec::new, |buf, b| {
            let mut rng = stream_rng(boot.seed, b as u64);
            block_resample(returns, boot.block, &mut rng, buf);
            point_estimates(buf, &hs, ref_idx, mode)
        })
        .collect();
    let widths = |pick: &dyn Fn(&PointEstimates) -> &Vec<f64>| -> Vec<f64> {
        (0..hs.len()).map(|i| half_width(reps.iter().map(|r| pick(r)[i]).collect(), boot.confidence)).collect()
    };
    let ci = DynamicsCi { var_hat: widths(&|r| &r.var), emiv_hat: widths(&|r| &r.emiv), riv: widths(&|r| &r.riv) };

    Ok(VarianceDynamics {
        horizons: hs,
        ref_horizon,
        mode,
        var_hat: est.var,
        eiv_hat: est.eiv,
        emiv_hat: est.emiv,
        riv: est.riv,
        ci,
        bootstrap: *boot,
        n_obs: returns.len(),
    })
}

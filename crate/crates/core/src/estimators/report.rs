use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dynamics::{variance_dynamics, BootstrapConfig};
use super::quantile::{quantile_moments, HINKLEY_ALPHA};
use super::series::{annualize, AggregationMode, ReturnSeries};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeReportOptions {
    /// Horizon of the EIV and RIV columns, in days.
    pub horizon_days: usize,
    pub ref_horizon: usize,
    pub mode: AggregationMode,
    pub bootstrap: BootstrapConfig,
    pub hinkley_alpha: f64,
}

impl Default for SizeReportOptions {
    fn default() -> Self {
        SizeReportOptions {
            horizon_days: 25,
            ref_horizon: 1,
            mode: AggregationMode::Overlap,
            bootstrap: BootstrapConfig::default(),
            hinkley_alpha: HINKLEY_ALPHA,
        }
    }
}

/// One portfolio's line of the size tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReportRow {
    pub label: String,
    pub n_obs: usize,
    pub eiv_annualized: f64,
    pub riv: f64,
    pub riv_ci: f64,
    pub var1_annualized: f64,
    pub hinkley_skewness: f64,
    pub cs_excess_kurtosis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub options: SizeReportOptions,
    pub rows: Vec<SizeReportRow>,
}

pub fn size_report(panel: &[ReturnSeries], opts: &SizeReportOptions) -> Result<SizeReport> {
    if panel.is_empty() {
        return Err(invalid("size report needs at least one series"));
    }
    let horizons = [opts.ref_horizon, opts.horizon_days];
    let rows = panel
        .par_iter()
        .enumerate()
        .map(|(k, s)| -> Result<SizeReportRow> {
            let boot = opts.bootstrap.with_seed(crate::rng::derive_seed(opts.bootstrap.seed, k as u64));
            let d = variance_dynamics(s.returns(), &horizons, opts.ref_horizon, opts.mode, &boot)?;
            let i = d.index_of(opts.horizon_days).expect("requested horizon");
            let r = d.index_of(opts.ref_horizon).expect("reference horizon");
            let q = quantile_moments(s.returns(), opts.hinkley_alpha)?;
            Ok(SizeReportRow {
                label: s.label().to_string(),
                n_obs: s.len(),
                eiv_annualized: annualize(d.eiv_hat[i], opts.horizon_days as f64),
                riv: d.riv[i],
                riv_ci: d.ci.riv[i],
                var1_annualized: annualize(d.var_hat[r], opts.ref_horizon as f64),
                hinkley_skewness: q.skewness_h,
                cs_excess_kurtosis: q.excess_kurtosis_cs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SizeReport { options: *opts, rows })
}

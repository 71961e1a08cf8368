//! Quantile-based shape measures.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Centering constant of the Crow–Siddiqui ratio.
pub const CS_CENTER: f64 = 2.91;
pub const HINKLEY_ALPHA: f64 = 0.05;

/// Sample quantile by linear interpolation between order statistics:
/// `x_(k) + f (x_(k+1) - x_(k))` with `(n - 1) q = k + f` (Hyndman–Fan type 7).
pub fn empirical_quantile(data: &[f64], q: f64) -> Result<f64> {
    let s = sorted(data)?;
    quantile_sorted(&s, q)
}

fn sorted(data: &[f64]) -> Result<Vec<f64>> {
    if data.len() < 2 {
        return Err(Error::InsufficientData(format!("quantiles need at least 2 values, got {}", data.len())));
    }
    if data.iter().any(|x| x.is_nan()) {
        return Err(Error::Data("NaN in quantile input".into()));
    }
    let mut s = data.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

fn quantile_sorted(s: &[f64], q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("quantile level must lie in (0, 1), got {q}")));
    }
    let h = (s.len() - 1) as f64 * q;
    let k = h.floor() as usize;
    let f = h - k as f64;
    Ok(if k + 1 < s.len() { s[k] + f * (s[k + 1] - s[k]) } else { s[k] })
}

/// `(Q(q), Q(1 - q))` for `q < 1/2`. The upper quantile is interpolated on
/// the reversed order statistics with the lower one's weights, which is the
/// same type-7 value but keeps mirror-image samples exactly antisymmetric.
fn quantile_pair(s: &[f64], q: f64) -> (f64, f64) {
    let n = s.len();
    let h = (n - 1) as f64 * q;
    let k = h.floor() as usize;
    let f = h - k as f64;
    let (a, b) = (s[k], s[k + 1]);
    let (ra, rb) = (s[n - 1 - k], s[n - 2 - k]);
    (a + f * (b - a), ra + f * (rb - ra))
}

/// `(Q(0.975) - Q(0.025)) / (Q(0.75) - Q(0.25)) - 2.91`
pub fn crow_siddiqui_kurtosis(data: &[f64]) -> Result<f64> {
    let s = sorted(data)?;
    cs_sorted(&s)
}

fn cs_sorted(s: &[f64]) -> Result<f64> {
    if s.len() < 1000 {
        log::warn!("Crow-Siddiqui kurtosis from only {} observations", s.len());
    }
    let (q1, q3) = quantile_pair(s, 0.25);
    let (t1, t3) = quantile_pair(s, 0.025);
    if !(q3 > q1) {
        return Err(Error::Degenerate("interquartile range is zero".into()));
    }
    Ok((t3 - t1) / (q3 - q1) - CS_CENTER)
}

/// `(Q(1-a) + Q(a) - 2 Q(0.5)) / (Q(1-a) - Q(a))`
pub fn hinkley_skewness(data: &[f64], alpha: f64) -> Result<f64> {
    let s = sorted(data)?;
    hinkley_sorted(&s, alpha)
}

fn hinkley_sorted(s: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(invalid(format!("Hinkley alpha must lie in (0, 0.5), got {alpha}")));
    }
    if s.len() < 100 {
        return Err(Error::InsufficientData(format!("Hinkley skewness needs at least 100 values, got {}", s.len())));
    }
    let (lo, hi) = quantile_pair(s, alpha);
    let med = quantile_sorted(s, 0.5)?;
    if !(hi > lo) {
        return Err(Error::Degenerate("quantile spread is zero".into()));
    }
    let num = (hi - med) - (med - lo);
    Ok((num / (hi - lo)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileMoments {
    pub skewness_h: f64,
    pub excess_kurtosis_cs: f64,
    pub alpha: f64,
}

pub fn quantile_moments(data: &[f64], alpha: f64) -> Result<QuantileMoments> {
    let s = sorted(data)?;
    Ok(QuantileMoments { skewness_h: hinkley_sorted(&s, alpha)?, excess_kurtosis_cs: cs_sorted(&s)?, alpha })
}

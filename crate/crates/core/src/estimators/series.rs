use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Daily log returns of one asset or portfolio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    label: String,
    /// Empty for synthetic series.
    dates: Vec<NaiveDate>,
    returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(label: impl Into<String>, dates: Vec<NaiveDate>, returns: Vec<f64>) -> Result<Self> {
        if dates.len() != returns.len() {
            return Err(invalid(format!("{} dates for {} returns", dates.len(), returns.len())));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Data(format!("dates not strictly increasing at {} -> {}", w[0], w[1])));
        }
        Self::check_values(&returns)?;
        Ok(ReturnSeries { label: label.into(), dates, returns })
    }

    /// An undated series, e.g. simulated returns.
    pub fn synthetic(label: impl Into<String>, returns: Vec<f64>) -> Result<Self> {
        Self::check_values(&returns)?;
        Ok(ReturnSeries { label: label.into(), dates: Vec::new(), returns })
    }

    fn check_values(r: &[f64]) -> Result<()> {
        match r.iter().position(|x| !x.is_finite()) {
            Some(i) => Err(Error::Data(format!("non-finite return at position {i}"))),
            None => Ok(()),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }
    pub fn returns(&self) -> &[f64] {
        &self.returns
    }
    pub fn len(&self) -> usize {
        self.returns.len()
    }
    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let returns = self.returns.iter().map(|r| r * c).collect();
        Self::new(self.label.clone(), self.dates.clone(), returns)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMode {
    Nonoverlap,
    #[default]
    Overlap,
}

impl std::str::FromStr for AggregationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overlap" => Ok(AggregationMode::Overlap),
            "nonoverlap" => Ok(AggregationMode::Nonoverlap),
            other => Err(invalid(format!("unknown aggregation mode '{other}' (overlap | nonoverlap)"))),
        }
    }
}

/// Sums of `h` consecutive returns: `⌊n/h⌋` disjoint windows from the start,
/// or all `n - h + 1` sliding windows.
pub fn aggregate_returns(s: &[f64], h: usize, mode: AggregationMode) -> Result<Vec<f64>> {
    if h == 0 {
        return Err(invalid("aggregation horizon must be at least 1 day"));
    }
    if s.len() < 2 * h {
        return Err(Error::InsufficientData(format!(
            "{} returns cannot form two {h}-day windows",
            s.len()
        )));
    }
    Ok(match mode {
        AggregationMode::Nonoverlap => s.chunks_exact(h).map(|c| c.iter().sum()).collect(),
        AggregationMode::Overlap => {
            let p = prefix_sums(s);
            (0..=s.len() - h).map(|i| p[i + h] - p[i]).collect()
        }
    })
}

pub(crate) fn prefix_sums(s: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(s.len() + 1);
    p.push(0.0);
    let mut acc = 0.0;
    for x in s {
        acc += x;
        p.push(acc);
    }
    p
}

/// Unbiased variance of the `h`-day sums, around their sample mean.
pub(crate) fn window_variance(p: &[f64], h: usize, mode: AggregationMode) -> f64 {
    let n = p.len() - 1;
    let (count, stride) = match mode {
        AggregationMode::Nonoverlap => (n / h, h),
        AggregationMode::Overlap => (n - h + 1, 1),
    };
    let sum_at = |k: usize| p[k * stride + h] - p[k * stride];
    let mean = (0..count).map(sum_at).sum::<f64>() / count as f64;
    (0..count).map(|k| (sum_at(k) - mean).powi(2)).sum::<f64>() / (count as f64 - 1.0)
}

/// `var_h * 252 / h`
pub fn annualize(var_h: f64, h_days: f64) -> f64 {
    var_h * crate::TRADING_DAYS_PER_YEAR / h_days
}

/// `var_year * h / 252`
pub fn deannualize(var_year: f64, h_days: f64) -> f64 {
    var_year * h_days / crate::TRADING_DAYS_PER_YEAR
}

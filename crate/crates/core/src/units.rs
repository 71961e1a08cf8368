use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Trading days per year; every annualization in the crate uses it.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// A strictly positive time span measured in years.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Horizon(f64);

impl Horizon {
    pub fn years(t: f64) -> Result<Self> {
        if t.is_finite() && t > 0.0 {
            Ok(Horizon(t))
        } else {
            Err(invalid(format!("horizon must be a positive finite number of years, got {t}")))
        }
    }

    pub fn trading_days(days: f64) -> Result<Self> {
        Self::years(days / TRADING_DAYS_PER_YEAR)
    }

    pub fn t(self) -> f64 {
        self.0
    }

    pub fn in_trading_days(self) -> f64 {
        self.0 * TRADING_DAYS_PER_YEAR
    }
}

impl TryFrom<f64> for Horizon {
    type Error = crate::Error;
    fn try_from(t: f64) -> Result<Self> {
        Horizon::years(t)
    }
}

impl From<Horizon> for f64 {
    fn from(h: Horizon) -> f64 {
        h.0
    }
}

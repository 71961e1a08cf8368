use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::units::Horizon;

pub const DEFAULT_STEPS_PER_YEAR: u32 = 8 * 252;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    EulerFullTruncation,
}

/// How the variance process is started.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum V0Mode {
    /// A draw from the stationary law of the model.
    Stationary,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSimConfig", into = "RawSimConfig")]
pub struct SimConfig {
    n_paths: usize,
    steps_per_year: u32,
    horizon: Horizon,
    seed: u64,
    scheme: Scheme,
}

#[derive(Serialize, Deserialize)]
struct RawSimConfig {
    n_paths: usize,
    #[serde(default = "default_steps")]
    steps_per_year: u32,
    horizon: Horizon,
    seed: u64,
    #[serde(default)]
    scheme: Scheme,
}

fn default_steps() -> u32 {
    DEFAULT_STEPS_PER_YEAR
}

impl TryFrom<RawSimConfig> for SimConfig {
    type Error = crate::Error;
    fn try_from(r: RawSimConfig) -> Result<Self> {
        Ok(SimConfig::new(r.n_paths, r.horizon, r.seed)?.with_steps_per_year(r.steps_per_year)?.with_scheme(r.scheme))
    }
}

impl From<SimConfig> for RawSimConfig {
    fn from(c: SimConfig) -> Self {
        RawSimConfig {
            n_paths: c.n_paths,
            steps_per_year: c.steps_per_year,
            horizon: c.horizon,
            seed: c.seed,
            scheme: c.scheme,
        }
    }
}

impl SimConfig {
    pub fn new(n_paths: usize, horizon: Horizon, seed: u64) -> Result<Self> {
        if n_paths == 0 {
            return Err(invalid("n_paths must be at least 1"));
        }
        Ok(SimConfig { n_paths, steps_per_year: DEFAULT_STEPS_PER_YEAR, horizon, seed, scheme: Scheme::default() })
    }

    pub fn with_steps_per_year(mut self, steps: u32) -> Result<Self> {
        if steps == 0 {
            return Err(invalid("steps_per_year must be at least 1"));
        }
        self.steps_per_year = steps;
        Ok(self)
    }

    pub fn with_horizon(mut self, horizon: Horizon) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_paths(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n_paths must be at least 1"));
        }
        self.n_paths = n;
        Ok(self)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }
    pub fn steps_per_year(&self) -> u32 {
        self.steps_per_year
    }
    pub fn horizon(&self) -> Horizon {
        self.horizon
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Whole steps covering the horizon, at least one.
    pub fn n_steps(&self) -> usize {
        ((self.steps_per_year as f64 * self.horizon.t() - 1e-9).ceil() as usize).max(1)
    }

    pub fn dt(&self) -> f64 {
        self.horizon.t() / self.n_steps() as f64
    }
}

//! Seeded Monte Carlo for stochastic-volatility models.

mod config;
mod models;
mod oracles;
mod paths;
mod srtr;

pub use config::{Scheme, SimConfig, V0Mode, DEFAULT_STEPS_PER_YEAR};
pub use models::{
    CirModel, ModelBuilder, ModelRegistry, PathIntegrals, SorensenModel, SorensenParams, VarianceModel, MAX_HALVINGS,
};
pub use oracles::{conditional_variance, conditional_variance_of, emiv_mc, mc_moments, srtr_prediction, viv_mc};
pub use paths::{
    simulate_cir, simulate_heston, simulate_heston_daily, simulate_sorensen, simulate_svm, BundleSummary, PathBundle,
    ReturnDynamics,
};
pub use srtr::{default_v0_grid, srtr_comparison, SrtrComparison, SrtrRow, DEFAULT_V0_POINTS};

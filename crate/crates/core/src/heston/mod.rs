//! Closed-form and asymptotic quantities of the Heston model.
//!
//! ```text
//! dX = (r - V/2) dt + rho sqrt(V) dW + sqrt(1 - rho^2) sqrt(V) dB
//! dV = kappa (theta - V) dt + sigma sqrt(V) dW
//! ```
//!
//! with `V_0` drawn from the stationary (Gamma) law of the CIR process.

mod cf;
mod compare;
mod density;
mod moments;
mod params;

pub use cf::{characteristic_exponent, ExponentWalker};
pub use compare::{compare_densities, DensityComparison};
pub use density::{default_grid, marginal_density, DensityCurve};
pub use moments::{
    eiv, emiv, fourth_central_moment, kurtosis, long_horizon_asymptotics, marginal_mean,
    marginal_variance, moment_set, short_horizon_moments, skewness, third_central_moment, viv,
    LongHorizonRates, VarianceDecomposition,
};
pub use params::HestonParams;

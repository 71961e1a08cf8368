//! Stochastic-volatility analytics.
//!
//! The crate is organised around five areas:
//!
//! * [`heston`] closed-form moments, the variance decomposition into
//!   EIV/VIV/EMIV, and the Fourier-inversion marginal density.
//! * [`sim`] seeded Monte Carlo for stochastic-volatility models with
//!   pluggable variance processes (CIR, Sørensen GIG diffusion).
//! * [`dist`] generalized hyperbolic / generalized inverse Gaussian laws,
//!   maximum-likelihood fitting and the Kolmogorov–Smirnov test.
//! * [`estimators`] marginal-variance dynamics, RIV and quantile-based shape
//!   measures computed from return series.
//! * [`io`] return-data ingestion, experiment configuration and reports.

pub mod dist;
pub mod error;
pub mod estimators;
pub mod heston;
pub mod io;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod units;

pub use error::{Error, ErrorKind, Result};
pub use units::{Horizon, TRADING_DAYS_PER_YEAR};

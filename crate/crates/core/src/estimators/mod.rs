//! Estimators of the interaction effect and robust shape measures from return data.

mod dynamics;
mod quantile;
mod report;
mod series;

pub use dynamics::{variance_dynamics, BootstrapConfig, DynamicsCi, FigureRow, VarianceDynamics, MIN_WINDOWS};
pub use quantile::{
    crow_siddiqui_kurtosis, empirical_quantile, hinkley_skewness, quantile_moments, QuantileMoments, CS_CENTER,
    HINKLEY_ALPHA,
};
pub use report::{size_report, SizeReport, SizeReportOptions, SizeReportRow};
pub use series::{aggregate_returns, annualize, deannualize, AggregationMode, ReturnSeries};

//! Data ingestion, experiment configuration and report persistence.

mod dates;
mod load;
mod report;
mod spec;
mod tables;

pub use chrono::NaiveDate;
pub use dates::parse_date;
pub use load::{load_dataset, load_ff_daily, load_prices, load_returns_csv, Panel, MISSING_CODES};
pub use report::{
    fmt_f64, read_report, to_csv, to_json, write_report, write_report_with, ReportFormat, Tabular, SCHEMA_VERSION,
};
pub use spec::{DatasetKind, DatasetSpec, ExperimentConfig, ReturnKind};
pub use tables::Table;

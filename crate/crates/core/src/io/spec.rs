use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{invalid, Error, Result};
use crate::heston::HestonParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    /// Fama–French daily portfolio file, returns in percent.
    FfDailyPercent,
    /// `date,<series>...` with decimal returns.
    ReturnsCsv,
    /// `date,<series>...` with price levels.
    PricesCsv,
}

/// Whether a returns file holds simple or log returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReturnKind {
    #[default]
    Simple,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub kind: DatasetKind,
    /// Series to keep; all when absent.
    #[serde(default)]
    pub columns: Option<Vec<String>>,
    /// Inclusive date range.
    #[serde(default)]
    pub start: Option<NaiveDate>,
    #[serde(default)]
    pub end: Option<NaiveDate>,
    /// Fama–French table to read, matched as a case-insensitive substring of
    /// the section title; the first table when absent.
    #[serde(default)]
    pub section: Option<String>,
    #[serde(default)]
    pub returns: ReturnKind,
}

impl DatasetSpec {
    pub fn new(path: impl Into<PathBuf>, kind: DatasetKind) -> Self {
        DatasetSpec { path: path.into(), kind, columns: None, start: None, end: None, section: None, returns: ReturnKind::Simple }
    }

    pub fn with_columns<S: Into<String>>(mut self, cols: impl IntoIterator<Item = S>) -> Self {
        self.columns = Some(cols.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_range(mut self, start: Option<NaiveDate>, end: Option<NaiveDate>) -> Self {
        self.start = start;
        self.end = end;
        self
    }

    pub fn with_section(mut self, s: impl Into<String>) -> Self {
        self.section = Some(s.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.start, self.end) {
            if a >= b {
                return Err(invalid(format!("date range start {a} must precede end {b}")));
            }
        }
        if let Some(c) = &self.columns {
            if c.is_empty() {
                return Err(invalid("column selection is empty"));
            }
        }
        Ok(())
    }

    pub(crate) fn in_range(&self, d: NaiveDate) -> bool {
        self.start.is_none_or(|s| d >= s) && self.end.is_none_or(|e| d <= e)
    }

    /// Resolves a relative path against `root`.
    pub fn rooted(mut self, root: &Path) -> Self {
        if self.path.is_relative() {
            self.path = root.join(&self.path);
        }
        self
    }
}

/// Parameters of a batch run, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub datasets: Vec<DatasetSpec>,
    /// Horizons in trading days.
    #[serde(default)]
    pub horizons: Vec<usize>,
    #[serde(default)]
    pub models: std::collections::BTreeMap<String, HestonParams>,
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: ExperimentConfig = toml::from_str(s).map_err(|e| invalid(format!("experiment config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::InvalidParameter(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.contains(&0) {
            return Err(invalid("horizons must be positive"));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("horizons must be strictly increasing"));
        }
        self.datasets.iter().try_for_each(DatasetSpec::validate)
    }
}

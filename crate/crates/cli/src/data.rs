use std::path::{Path, PathBuf};

use svol_core::estimators::ReturnSeries;
use svol_core::io::{load_dataset, parse_date, DatasetSpec, ReturnKind};

use crate::args::DataArgs;
use crate::error::{usage, Result};

pub const DATA_DIR_VAR: &str = "SVOL_DATA_DIR";

/// Resolves a relative dataset path against `$SVOL_DATA_DIR`, when set.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(DATA_DIR_VAR) {
        Some(root) if path.is_relative() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn date_arg(flag: &str, s: Option<&str>) -> Result<Option<svol_core::io::NaiveDate>> {
    s.map(|s| parse_date(s).ok_or_else(|| usage(format!("--{flag}: cannot parse date '{s}' (YYYYMMDD or YYYY-MM-DD)"))))
        .transpose()
}

impl DataArgs {
    pub fn spec(&self) -> Result<DatasetSpec> {
        let mut spec = DatasetSpec::new(resolve(&self.data), self.kind.into())
            .with_range(date_arg("start", self.start.as_deref())?, date_arg("end", self.end.as_deref())?);
        if !self.columns.is_empty() {
            spec = spec.with_columns(self.columns.iter().cloned());
        }
        if let Some(s) = &self.section {
            spec = spec.with_section(s.clone());
        }
        if self.log_returns {
            spec.returns = ReturnKind::Log;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(&self) -> Result<Vec<ReturnSeries>> {
        let spec = self.spec()?;
        let panel = load_dataset(&spec)?;
        for s in &panel.series {
            log::info!("{}: '{}' has {} observations", spec.path.display(), s.label(), s.len());
        }
        Ok(panel.series)
    }

    pub fn provenance(&self) -> Vec<String> {
        let mut p = vec![format!("data: {}", self.data.display())];
        if let Some(s) = &self.start {
            p.push(format!("start: {s}"));
        }
        if let Some(e) = &self.end {
            p.push(format!("end: {e}"));
        }
        p
    }
}

/// File-name-safe form of a series label.
pub fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    let s = s.trim_matches('_').to_string();
    if s.is_empty() { "series".into() } else { s }
}

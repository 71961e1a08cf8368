use serde::Serialize;
use std::path::PathBuf;

use svol_core::io::{fmt_f64, write_report_with, ReportFormat, Tabular};
use svol_core::TRADING_DAYS_PER_YEAR;

use crate::error::Result;

/// Writes reports under one directory and remembers what it wrote.
pub struct Output {
    dir: PathBuf,
    format: ReportFormat,
    header: Vec<String>,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: PathBuf, format: ReportFormat, command: &str, seed: u64) -> Self {
        let header = vec![
            format!("svol {} {command}", env!("CARGO_PKG_VERSION")),
            format!("seed: {seed}"),
            format!("trading days per year: {TRADING_DAYS_PER_YEAR}"),
        ];
        Output { dir, format, header, written: Vec::new() }
    }

    /// Reports written from here on are CSV whatever `--format` says.
    pub fn force_csv(&mut self) {
        self.format = ReportFormat::Csv;
    }

    pub fn write<T: Serialize + Tabular>(&mut self, stem: &str, value: &T, extra: &[String]) -> Result<PathBuf> {
        let ext = match self.format {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        };
        self.write_as(stem, ext, self.format, value, extra)
    }

    pub fn write_json<T: Serialize + Tabular>(&mut self, stem: &str, value: &T, extra: &[String]) -> Result<PathBuf> {
        self.write_as(stem, "json", ReportFormat::Json, value, extra)
    }

    fn write_as<T: Serialize + Tabular>(
        &mut self,
        stem: &str,
        ext: &str,
        format: ReportFormat,
        value: &T,
        extra: &[String],
    ) -> Result<PathBuf> {
        let path = self.dir.join(format!("{stem}.{ext}"));
        let mut prov = self.header.clone();
        prov.extend(extra.iter().cloned());
        write_report_with(value, format, &path, &prov)?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Path for an artifact written by other means.
    pub fn claim(&mut self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.dir).map_err(|e| svol_core::Error::Io { path: self.dir.clone(), source: e })?;
        let p = self.dir.join(name);
        self.written.push(p.clone());
        Ok(p)
    }

    pub fn into_written(self) -> Vec<PathBuf> {
        self.written
    }
}

/// A table whose first column is a text label.
#[derive(Debug, Clone, Serialize)]
pub struct LabeledTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl LabeledTable {
    pub fn new(columns: &[&str]) -> Self {
        LabeledTable { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, label: impl Into<String>, values: Vec<f64>) {
        debug_assert_eq!(values.len() + 1, self.columns.len());
        self.rows.push((label.into(), values));
    }
}

impl Tabular for LabeledTable {
    const KIND: &'static str = "labeled_table";
    fn header(&self) -> Vec<String> {
        self.columns.clone()
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|(l, v)| std::iter::once(l.clone()).chain(v.iter().map(|x| fmt_f64(*x))).collect())
            .collect()
    }
}

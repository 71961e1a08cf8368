use chrono::NaiveDate;
use csv::{ReaderBuilder, StringRecord, Trim};
use std::path::Path;

use super::dates::parse_date;
use super::spec::{DatasetKind, DatasetSpec, ReturnKind};
use crate::error::{Error, Result};
use crate::estimators::ReturnSeries;

/// Fama–French missing-value codes.
pub const MISSING_CODES: [f64; 2] = [-99.99, -999.0];

/// Series loaded from one file, with the number of dropped observations per series.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub series: Vec<ReturnSeries>,
    pub dropped: Vec<(String, usize)>,
}

impl Panel {
    pub fn get(&self, label: &str) -> Option<&ReturnSeries> {
        self.series.iter().find(|s| s.label() == label)
    }
}

pub fn load_dataset(spec: &DatasetSpec) -> Result<Panel> {
    match spec.kind {
        DatasetKind::FfDailyPercent => load_ff_daily(spec),
        DatasetKind::ReturnsCsv => load_returns_csv(spec),
        DatasetKind::PricesCsv => load_prices(spec),
    }
}

fn parse_err(path: &Path, line: u64, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line: line as usize, msg: msg.into() }
}

fn open(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::Data(format!("data file {} not found", path.display())));
    }
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn is_missing(v: f64) -> bool {
    MISSING_CODES.iter().any(|m| (v - m).abs() < 1e-9)
}

struct Table {
    title: String,
    columns: Vec<String>,
    rows: Vec<(u64, StringRecord)>,
}

/// Splits a Fama–French file into its titled tables. A record whose first
/// field is empty starts a table (its column header), a record starting with
/// an 8-digit date is data, anything else is descriptive text and becomes the
/// title of the next table.
fn ff_tables(path: &Path, text: &str) -> Result<Vec<Table>> {
    let mut rdr = ReaderBuilder::new().has_headers(false).flexible(true).trim(Trim::All).from_reader(text.as_bytes());
    let mut tables: Vec<Table> = Vec::new();
    let mut title = String::new();
    let mut open_table = false;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let first = &rec[0];
        if first.is_empty() {
            tables.push(Table {
                title: std::mem::take(&mut title),
                columns: rec.iter().skip(1).map(str::to_string).collect(),
                rows: Vec::new(),
            });
            open_table = true;
        } else if first.len() == 8 && first.bytes().all(|b| b.is_ascii_digit()) {
            if !open_table {
                return Err(parse_err(path, line, "data row before any column header"));
            }
            tables.last_mut().expect("open table").rows.push((line, rec));
        } else {
            open_table = false;
            let t = rec.iter().filter(|f| !f.is_empty()).collect::<Vec<_>>().join(", ");
            if !title.is_empty() {
                title.push(' ');
            }
            title.push_str(&t);
        }
    }
    Ok(tables)
}

fn select_columns(path: &Path, available: &[String], wanted: Option<&Vec<String>>) -> Result<Vec<usize>> {
    match wanted {
        None => Ok((0..available.len()).collect()),
        Some(w) => w
            .iter()
            .map(|name| {
                available.iter().position(|a| a.trim().eq_ignore_ascii_case(name.trim())).ok_or_else(|| {
                    Error::Data(format!(
                        "{}: no column '{name}' (available: {})",
                        path.display(),
                        available.join(", ")
                    ))
                })
            })
            .collect(),
    }
}

struct Builder {
    label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
    dropped: usize,
}

/// Series left empty are an error when they were asked for by name, and are
/// skipped with a warning otherwise.
fn finish(path: &Path, builders: Vec<Builder>, explicit: bool) -> Result<Panel> {
    let mut panel = Panel { series: Vec::new(), dropped: Vec::new() };
    for b in builders {
        if b.values.is_empty() {
            if explicit {
                return Err(Error::Data(format!("{}: selection for '{}' is empty", path.display(), b.label)));
            }
            log::warn!("{}: skipping '{}', no observations in range", path.display(), b.label);
            continue;
        }
        if b.dropped > 0 {
            log::info!("{}: dropped {} missing values from '{}'", path.display(), b.dropped, b.label);
        }
        panel.dropped.push((b.label.clone(), b.dropped));
        panel.series.push(ReturnSeries::new(b.label, b.dates, b.values)?);
    }
    if panel.series.is_empty() {
        return Err(Error::Data(format!("{}: no series has observations in the selected range", path.display())));
    }
    Ok(panel)
}

/// Reads a Fama–French daily portfolio file: percent returns become log
/// returns `ln(1 + r/100)`, missing codes are dropped and counted per series.
pub fn load_ff_daily(spec: &DatasetSpec) -> Result<Panel> {
    spec.validate()?;
    let path = spec.path.as_path();
    let text = open(path)?;
    let tables = ff_tables(path, &text)?;
    let table = match &spec.section {
        None => tables.iter().find(|t| !t.rows.is_empty()),
        Some(s) => {
            let s = s.to_ascii_lowercase();
            tables.iter().find(|t| t.title.to_ascii_lowercase().contains(&s))
        }
    }
    .ok_or_else(|| {
        Error::Data(format!(
            "{}: no table matching section {:?} (found: {})",
            path.display(),
            spec.section,
            tables.iter().map(|t| format!("'{}'", t.title)).collect::<Vec<_>>().join(", ")
        ))
    })?;
    let cols = select_columns(path, &table.columns, spec.columns.as_ref())?;
    let mut builders: Vec<Builder> = cols
        .iter()
        .map(|&c| Builder { label: table.columns[c].clone(), dates: Vec::new(), values: Vec::new(), dropped: 0 })
        .collect();
    let mut last: Option<NaiveDate> = None;
    for (line, rec) in &table.rows {
        let line = *line;
        if rec.len() != table.columns.len() + 1 {
            return Err(parse_err(path, line, format!("expected {} fields, found {}", table.columns.len() + 1, rec.len())));
        }
        let date = parse_date(&rec[0]).ok_or_else(|| parse_err(path, line, format!("bad date '{}'", &rec[0])))?;
        if last.is_some_and(|l| date <= l) {
            return Err(parse_err(path, line, format!("date {date} does not follow {}", last.expect("checked"))));
        }
        last = Some(date);
        if !spec.in_range(date) {
            continue;
        }
        for (b, &c) in builders.iter_mut().zip(&cols) {
            let raw = &rec[c + 1];
            let v: f64 = raw.parse().map_err(|_| parse_err(path, line, format!("bad number '{raw}' in '{}'", b.label)))?;
            if is_missing(v) {
                b.dropped += 1;
                continue;
            }
            let gross = 1.0 + v / 100.0;
            if !(gross > 0.0) {
                return Err(parse_err(path, line, format!("return {v}% is at or below -100%")));
            }
            b.dates.push(date);
            b.values.push(gross.ln());
        }
    }
    finish(path, builders, spec.columns.is_some())
}

struct Csv {
    columns: Vec<String>,
    rows: Vec<(u64, NaiveDate, StringRecord)>,
}

fn read_dated_csv(path: &Path, text: &str) -> Result<Csv> {
    let mut rdr = ReaderBuilder::new().trim(Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| parse_err(path, 1, e.to_string()))?.clone();
    if header.len() < 2 {
        return Err(parse_err(path, 1, "expected a date column and at least one series"));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    let mut last: Option<NaiveDate> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let date = parse_date(&rec[0]).ok_or_else(|| parse_err(path, line, format!("bad date '{}'", &rec[0])))?;
        if last.is_some_and(|l| date <= l) {
            return Err(parse_err(path, line, format!("date {date} does not follow {}; rows must be sorted", last.expect("checked"))));
        }
        last = Some(date);
        rows.push((line, date, rec));
    }
    Ok(Csv { columns, rows })
}

fn missing_cell(s: &str) -> bool {
    s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("nan")
}

/// `date,<series>...` with decimal returns (simple unless `returns = log`).
pub fn load_returns_csv(spec: &DatasetSpec) -> Result<Panel> {
    spec.validate()?;
    let path = spec.path.as_path();
    let csv = read_dated_csv(path, &open(path)?)?;
    let cols = select_columns(path, &csv.columns, spec.columns.as_ref())?;
    let mut builders: Vec<Builder> = cols
        .iter()
        .map(|&c| Builder { label: csv.columns[c].clone(), dates: Vec::new(), values: Vec::new(), dropped: 0 })
        .collect();
    for (line, date, rec) in &csv.rows {
        if !spec.in_range(*date) {
            continue;
        }
        for (b, &c) in builders.iter_mut().zip(&cols) {
            let raw = rec.get(c + 1).unwrap_or("");
            if missing_cell(raw) {
                b.dropped += 1;
                continue;
            }
            let v: f64 = raw.parse().map_err(|_| parse_err(path, *line, format!("bad number '{raw}'")))?;
            let x = match spec.returns {
                ReturnKind::Log => v,
                ReturnKind::Simple if v > -1.0 => (1.0 + v).ln(),
                ReturnKind::Simple => return Err(parse_err(path, *line, format!("simple return {v} is at or below -1"))),
            };
            b.dates.push(*date);
            b.values.push(x);
        }
    }
    finish(path, builders, spec.columns.is_some())
}

/// `date,<series>...` with positive price levels; returns are `ln(S_i / S_{i-1})`
/// between consecutive available prices.
pub fn load_prices(spec: &DatasetSpec) -> Result<Panel> {
    spec.validate()?;
    let path = spec.path.as_path();
    let csv = read_dated_csv(path, &open(path)?)?;
    let cols = select_columns(path, &csv.columns, spec.columns.as_ref())?;
    let mut builders: Vec<Builder> = cols
        .iter()
        .map(|&c| Builder { label: csv.columns[c].clone(), dates: Vec::new(), values: Vec::new(), dropped: 0 })
        .collect();
    let mut prev: Vec<Option<f64>> = vec![None; cols.len()];
    for (line, date, rec) in &csv.rows {
        if !spec.in_range(*date) {
            continue;
        }
        for ((b, &c), p) in builders.iter_mut().zip(&cols).zip(prev.iter_mut()) {
            let raw = rec.get(c + 1).unwrap_or("");
            if missing_cell(raw) {
                b.dropped += 1;
                continue;
            }
            let s: f64 = raw.parse().map_err(|_| parse_err(path, *line, format!("bad price '{raw}'")))?;
            if !(s > 0.0 && s.is_finite()) {
                return Err(parse_err(path, *line, format!("price {s} is not positive")));
            }
            if let Some(p0) = *p {
                b.dates.push(*date);
                b.values.push((s / p0).ln());
            }
            *p = Some(s);
        }
    }
    finish(path, builders, spec.columns.is_some())
}

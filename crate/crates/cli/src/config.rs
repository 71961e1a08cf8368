//! `--config FILE` support.
//!
//! The file is TOML. Top-level scalar keys are global flags (`seed`, `out`,
//! `format`); a table named after a subcommand holds that command's flags.
//! Keys are flag names with `_` or `-`. Values become flag arguments:
//! strings and numbers as-is, arrays joined with commas, `true` as a bare
//! switch (`false` is ignored). Flags given on the command line win.
//!
//! ```toml
//! seed = 7
//! out = "results"
//!
//! [srtr]
//! kappa = 16.0
//! theta = 0.04
//! sigma = 0.3
//! rho = -0.7
//! v0_grid = [0.02, 0.04, 0.06]
//! ```

use clap::CommandFactory;
use std::ffi::OsString;
use std::path::Path;
use toml::{Table, Value};

use crate::args::Cli;
use crate::error::{usage, CliError, Result};

/// Global options that take a value, so the scanner can skip it.
const VALUE_GLOBALS: [&str; 4] = ["--seed", "--out", "--format", "--config"];

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand_index(args: &[String]) -> Option<usize> {
    let cmd = Cli::command();
    let names: Vec<&str> = cmd.get_subcommands().map(|c| c.get_name()).collect();
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if VALUE_GLOBALS.contains(&a) {
            i += 2;
            continue;
        }
        if names.contains(&a) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn render(key: &str, v: &Value) -> Result<Option<String>> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        Value::Boolean(true) => return Ok(Some(String::new())),
        Value::Boolean(false) => return Ok(None),
        Value::Array(xs) => xs
            .iter()
            .map(|x| match x {
                Value::Array(_) | Value::Table(_) => Err(usage(format!("config key '{key}': nested arrays are not supported"))),
                other => render(key, other).map(|r| r.unwrap_or_default()),
            })
            .collect::<Result<Vec<_>>>()?
            .join(","),
        Value::Datetime(d) => d.to_string(),
        Value::Table(_) => return Err(usage(format!("config key '{key}': tables are only allowed at the top level"))),
    };
    Ok(Some(s))
}

fn flags(table: &Table, present: &[String], skip_tables: bool) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (key, v) in table {
        if skip_tables && v.is_table() {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        if present.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        match render(key, v)? {
            None => {}
            Some(s) if s.is_empty() && matches!(v, Value::Boolean(true)) => out.push(flag),
            Some(s) => out.push(format!("{flag}={s}")),
        }
    }
    Ok(out)
}

/// Splices flags from the `--config` file into `argv`.
pub fn expand_args(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let args: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let Some(path) = config_path(&args) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Core(svol_core::Error::Io { path: Path::new(&path).to_path_buf(), source: e }))?;
    let table: Table = text.parse().map_err(|e| usage(format!("{path}: {e}")))?;
    let Some(at) = subcommand_index(&args) else {
        return Ok(argv);
    };
    let name = args[at].as_str();
    for (k, v) in &table {
        if v.is_table() && !Cli::command().get_subcommands().any(|c| c.get_name() == k) {
            return Err(usage(format!("{path}: [{k}] is not a subcommand")));
        }
    }
    let globals = flags(&table, &args, true)?;
    let local = match table.get(name) {
        Some(Value::Table(t)) => flags(t, &args, false)?,
        _ => Vec::new(),
    };
    let mut out: Vec<OsString> = argv[..at].to_vec();
    out.extend(globals.into_iter().map(OsString::from));
    out.push(argv[at].clone());
    out.extend(local.into_iter().map(OsString::from));
    out.extend(argv[at + 1..].iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn expand(cfg: &str, args: &[&str]) -> Result<Vec<String>> {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, cfg).unwrap();
        let mut argv: Vec<OsString> = vec!["svol".into(), "--config".into(), p.clone().into()];
        argv.extend(args.iter().map(OsString::from));
        expand_args(argv).map(|v| v.into_iter().map(|a| a.into_string().unwrap()).collect())
    }

    #[test]
    fn injects_missing_flags_only() {
        let cfg = "seed = 7\n[srtr]\nkappa = 16.0\ntheta = 0.04\nsigma = 0.3\nrho = -0.7\nv0_grid = [0.02, 0.04]\nallow_feller_violation = true\n";
        let a = expand(cfg, &["srtr", "--kappa", "2"]).unwrap();
        assert!(a.contains(&"--seed=7".to_string()));
        assert!(a.contains(&"--v0-grid=0.02,0.04".to_string()));
        assert!(a.contains(&"--allow-feller-violation".to_string()));
        assert!(!a.iter().any(|s| s.starts_with("--kappa=")));
        let cli = Cli::try_parse_from(a).unwrap();
        assert_eq!(cli.seed, 7);
        match cli.command {
            crate::args::Command::Srtr(s) => {
                assert_eq!(s.coeff.kappa, 2.0);
                assert_eq!(s.rho, -0.7);
                assert_eq!(s.v0_grid, vec![0.02, 0.04]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn other_sections_are_ignored_and_unknown_rejected() {
        let cfg = "[moments]\nkappa = 1.0\n[srtr]\nkappa = 3.0\n";
        let a = expand(cfg, &["moments"]).unwrap();
        assert!(a.contains(&"--kappa=1".to_string()));
        assert!(!a.contains(&"--kappa=3".to_string()));
        assert!(expand("[bogus]\nx = 1\n", &["moments"]).is_err());
        assert!(expand("not toml = = 1", &["moments"]).is_err());
    }
}

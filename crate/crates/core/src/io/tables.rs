//! Tabular views of the library's result types.

use super::report::{fmt_f64, Tabular};
use crate::dist::fit::GhFit;
use crate::dist::KsResult;
use crate::estimators::{SizeReport, VarianceDynamics};
use crate::heston::{DensityComparison, DensityCurve};
use crate::sim::{BundleSummary, SrtrComparison};
use crate::stats::MomentSet;

fn f(v: f64) -> String {
    fmt_f64(v)
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

impl Tabular for VarianceDynamics {
    const KIND: &'static str = "variance_dynamics";
    fn header(&self) -> Vec<String> {
        strings(&[
            "horizon_days",
            "var_annualized",
            "eiv_annualized",
            "ci_lo",
            "ci_hi",
            "var_hat",
            "eiv_hat",
            "emiv_hat",
            "riv",
            "riv_ci",
        ])
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.figure_rows()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    r.horizon_days.to_string(),
                    f(r.var_annualized),
                    f(r.eiv_annualized),
                    f(r.ci_lo),
                    f(r.ci_hi),
                    f(self.var_hat[i]),
                    f(self.eiv_hat[i]),
                    f(self.emiv_hat[i]),
                    f(self.riv[i]),
                    f(self.ci.riv[i]),
                ]
            })
            .collect()
    }
}

impl Tabular for SizeReport {
    const KIND: &'static str = "size_report";
    fn header(&self) -> Vec<String> {
        strings(&[
            "portfolio",
            "n_obs",
            "eiv25_annualized",
            "riv25",
            "riv25_ci",
            "var1_annualized",
            "hinkley_skewness",
            "cs_excess_kurtosis",
        ])
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.label.clone(),
                    r.n_obs.to_string(),
                    f(r.eiv_annualized),
                    f(r.riv),
                    f(r.riv_ci),
                    f(r.var1_annualized),
                    f(r.hinkley_skewness),
                    f(r.cs_excess_kurtosis),
                ]
            })
            .collect()
    }
}

impl Tabular for DensityCurve {
    const KIND: &'static str = "density_curve";
    fn header(&self) -> Vec<String> {
        strings(&["x", "density"])
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.grid.iter().zip(&self.values).map(|(x, d)| vec![f(*x), f(*d)]).collect()
    }
}

impl Tabular for DensityComparison {
    const KIND: &'static str = "density_comparison";
    fn header(&self) -> Vec<String> {
        std::iter::once("x".to_string())
            .chain(self.rhos.iter().map(|r| format!("density_rho_{r}")))
            .collect()
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.grid
            .iter()
            .enumerate()
            .map(|(i, x)| std::iter::once(f(*x)).chain(self.densities.iter().map(|d| f(d[i]))).collect())
            .collect()
    }
}

impl Tabular for SrtrComparison {
    const KIND: &'static str = "srtr_comparison";
    fn header(&self) -> Vec<String> {
        strings(&["v0", "srtr", "mc_conditional_variance", "se", "stationary_weight"])
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![f(r.v0), f(r.srtr), f(r.mc.value), f(r.mc.se), f(r.weight)])
            .collect()
    }
}

impl Tabular for MomentSet {
    const KIND: &'static str = "moment_set";
    fn header(&self) -> Vec<String> {
        strings(&["statistic", "value", "se"])
    }
    fn rows(&self) -> Vec<Vec<String>> {
        let se = self.standard_errors;
        let cell = |v: Option<f64>| v.map(f).unwrap_or_default();
        vec![
            vec!["mean".into(), f(self.mean), cell(se.map(|s| s.mean))],
            vec!["variance".into(), f(self.variance), cell(se.map(|s| s.variance))],
            vec!["skewness".into(), f(self.skewness), cell(se.map(|s| s.skewness))],
            vec!["excess_kurtosis".into(), f(self.excess_kurtosis), cell(se.map(|s| s.excess_kurtosis))],
        ]
    }
}

impl Tabular for BundleSummary {
    const KIND: &'static str = "path_bundle_summary";
    fn header(&self) -> Vec<String> {
        strings(&["quantity", "value", "se"])
    }
    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![
            vec!["v_terminal_mean".into(), f(self.v_terminal.value), f(self.v_terminal.se)],
            vec!["int_var_mean".into(), f(self.int_var.value), f(self.int_var.se)],
            vec!["stoch_int_mean".into(), f(self.stoch_int.value), f(self.stoch_int.se)],
        ];
        if let Some(x) = &self.x {
            for mut r in x.rows() {
                r[0] = format!("x_{}", r[0]);
                rows.push(r);
            }
        }
        rows
    }
}

impl Tabular for GhFit {
    const KIND: &'static str = "gh_fit";
    fn header(&self) -> Vec<String> {
        strings(&["lambda", "alpha", "beta", "delta", "mu", "log_likelihood", "n", "gradient_norm"])
    }
    fn rows(&self) -> Vec<Vec<String>> {
        let p = &self.params;
        vec![vec![
            f(p.lambda()),
            f(p.alpha()),
            f(p.beta()),
            f(p.delta()),
            f(p.mu()),
            f(self.log_likelihood),
            self.n.to_string(),
            f(self.gradient_norm),
        ]]
    }
}

impl Tabular for KsResult {
    const KIND: &'static str = "ks_result";
    fn header(&self) -> Vec<String> {
        strings(&["statistic", "p_value", "n_effective"])
    }
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![f(self.statistic), f(self.p_value), self.n_effective.to_string()]]
    }
}

/// Any header plus string rows, for ad-hoc tables.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

impl Tabular for Table {
    const KIND: &'static str = "table";
    fn header(&self) -> Vec<String> {
        self.columns.clone()
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(|v| f(*v)).collect()).collect()
    }
}

//! Named bundles of commands that regenerate a figure's data or a table.

use std::path::PathBuf;

use svol_core::estimators::{AggregationMode, ReturnSeries, SizeReport, HINKLEY_ALPHA};
use svol_core::heston::{compare_densities, HestonParams};
use svol_core::io::{load_dataset, DatasetKind, DatasetSpec, NaiveDate};
use svol_core::sim::{DEFAULT_STEPS_PER_YEAR, DEFAULT_V0_POINTS};
use svol_core::{Error, Horizon};

use crate::args::{BootstrapArgs, ReproduceArgs};
use crate::commands::{
    density_provenance, dynamics_per_series, dynamics_provenance, fit_density_table, fit_provenance, ks_tables,
    run_srtr, size_options, size_provenance, srtr_provenance,
};
use crate::data::{date_arg, resolve, slug, DATA_DIR_VAR};
use crate::error::{usage, Result};
use crate::output::{LabeledTable, Output};

pub const SIZE_FILE: &str = "Portfolios_Formed_on_ME_daily.csv";
const SIZE_SECTION: &str = "value weight";
const SIZE_COLUMNS: [&str; 5] = ["Lo 20", "Qnt 2", "Qnt 3", "Qnt 4", "Hi 20"];
const SIZE_LABELS: [&str; 5] = ["0%-20%", "20%-40%", "40%-60%", "60%-80%", "80%-100%"];
const SIZE_START: (i32, u32, u32) = (1926, 7, 1);
const SIZE_END: (i32, u32, u32) = (2019, 1, 31);
pub const INDEX_FILE: &str = "sp500_daily.csv";

const DENSITY_GRID: usize = 801;
const DENSITY_WIDTH_SD: f64 = 10.0;
const SRTR_PATHS: usize = 100_000;
const DYNAMICS_HORIZONS: [usize; 13] = [1, 5, 10, 25, 50, 75, 100, 125, 150, 175, 200, 225, 250];
const KS_STRIDE: usize = 21;
const FIT_BINS: usize = 200;

/// Reference spot values printed next to the computed ones.
const RIV25_REFERENCE: [f64; 2] = [0.51, 0.053];
const CS_REFERENCE: [f64; 2] = [2.22, 1.73];
const SPOT_TOLERANCE: f64 = 0.05;

pub struct RecipeContext<'a> {
    pub args: &'a ReproduceArgs,
    pub seed: u64,
    pub name: &'a str,
}

pub trait Recipe: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn run(&self, ctx: &RecipeContext, out: &mut Output) -> Result<()>;
}

pub struct RecipeRegistry {
    recipes: Vec<Box<dyn Recipe>>,
}

impl Default for RecipeRegistry {
    fn default() -> Self {
        let mut r = RecipeRegistry { recipes: Vec::new() };
        r.register(Box::new(Fig1));
        r.register(Box::new(Fig2));
        r.register(Box::new(Fig3));
        r.register(Box::new(Fig4To6));
        r.register(Box::new(Table1));
        r.register(Box::new(Table2));
        r
    }
}

impl RecipeRegistry {
    pub fn register(&mut self, recipe: Box<dyn Recipe>) {
        self.recipes.retain(|r| r.name() != recipe.name());
        self.recipes.push(recipe);
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Recipe> {
        self.recipes.iter().map(|r| r.as_ref())
    }

    pub fn get(&self, name: &str) -> Option<&dyn Recipe> {
        self.iter().find(|r| r.name() == name)
    }

    pub fn run(&self, name: &str, args: &ReproduceArgs, seed: u64, out: &mut Output) -> Result<()> {
        let recipe = self.get(name).ok_or_else(|| {
            usage(format!(
                "unknown recipe '{name}' (known: {})",
                self.iter().map(|r| r.name()).collect::<Vec<_>>().join(", ")
            ))
        })?;
        out.force_csv();
        recipe.run(&RecipeContext { args, seed, name }, out)
    }
}

fn ymd((y, m, d): (i32, u32, u32)) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid constant date")
}

fn default_bootstrap() -> BootstrapArgs {
    BootstrapArgs { block: 25, resamples: 1000, confidence: 0.95 }
}

/// Locates a recipe's data file, failing before any work when it is absent.
fn locate(ctx: &RecipeContext, default_name: &str, what: &str) -> Result<PathBuf> {
    let path = resolve(ctx.args.data.as_deref().unwrap_or(default_name.as_ref()));
    if !path.is_file() {
        return Err(Error::Data(format!(
            "recipe '{}' needs {what} '{default_name}', not found at {}; put it in ${DATA_DIR_VAR} or pass --data",
            ctx.name,
            path.display()
        ))
        .into());
    }
    Ok(path)
}

fn size_panel(ctx: &RecipeContext) -> Result<(Vec<ReturnSeries>, Vec<String>)> {
    let start = date_arg("start", ctx.args.start.as_deref())?.unwrap_or(ymd(SIZE_START));
    let end = date_arg("end", ctx.args.end.as_deref())?.unwrap_or(ymd(SIZE_END));
    let path = locate(ctx, SIZE_FILE, "the Fama-French daily size-portfolio file")?;
    let columns: Vec<String> = if ctx.args.columns.is_empty() {
        SIZE_COLUMNS.iter().map(|s| s.to_string()).collect()
    } else {
        ctx.args.columns.clone()
    };
    let spec = DatasetSpec::new(&path, ctx.args.kind.map_or(DatasetKind::FfDailyPercent, Into::into))
        .with_columns(columns)
        .with_range(Some(start), Some(end))
        .with_section(SIZE_SECTION);
    spec.validate()?;
    let panel = load_dataset(&spec)?;
    for (label, n) in &panel.dropped {
        log::info!("{label}: {n} missing values dropped");
    }
    let prov = vec![
        format!("data: {} (table matching '{SIZE_SECTION}')", path.file_name().unwrap_or_default().to_string_lossy()),
        format!("date range: {start} to {end}"),
    ];
    Ok((panel.series, prov))
}

fn portfolio_label(column: &str) -> String {
    SIZE_COLUMNS
        .iter()
        .position(|c| c.eq_ignore_ascii_case(column))
        .map_or_else(|| column.to_string(), |i| SIZE_LABELS[i].to_string())
}

fn spot_line(what: &str, computed: [f64; 2], reference: [f64; 2]) -> String {
    let ok = computed.iter().zip(&reference).all(|(c, r)| (c - r).abs() <= SPOT_TOLERANCE);
    format!(
        "{what} smallest/largest: {:.3}/{:.3}, reference {}/{} (within ±{SPOT_TOLERANCE}: {})",
        computed[0],
        computed[1],
        reference[0],
        reference[1],
        if ok { "yes" } else { "no" }
    )
}

fn size_report_for(ctx: &RecipeContext) -> Result<(SizeReport, Vec<String>)> {
    let (series, mut prov) = size_panel(ctx)?;
    let opts = size_options(25, 1, AggregationMode::Overlap, HINKLEY_ALPHA, &default_bootstrap(), ctx.seed);
    let report = svol_core::estimators::size_report(&series, &opts)?;
    prov.extend(size_provenance(&report));
    Ok((report, prov))
}

fn ends<T: Copy>(xs: &[T]) -> [T; 2] {
    [xs[0], xs[xs.len() - 1]]
}

struct Fig1;

impl Recipe for Fig1 {
    fn name(&self) -> &'static str {
        "fig1"
    }
    fn describe(&self) -> &'static str {
        "5-day Heston densities with rho = 0 and rho = -1 under strong and weak mean reversion"
    }
    fn run(&self, _ctx: &RecipeContext, out: &mut Output) -> Result<()> {
        let t = Horizon::trading_days(5.0)?;
        for (stem, kappa, sigma) in [("fig1_strong_reversion", 16.0, 0.8), ("fig1_weak_reversion", 1.0, 0.02)] {
            let p = HestonParams::new(0.0, kappa, 0.04, sigma, 0.0)?;
            let c = compare_densities(&p, &[0.0, -1.0], t, DENSITY_GRID, DENSITY_WIDTH_SD)?;
            log::info!("{stem}: sup gap / peak = {:.4}", c.relative_gap());
            let mut prov = vec![format!("model: r = 0, kappa = {kappa}, theta = 0.04, sigma = {sigma}, rho in [0, -1]")];
            prov.extend(density_provenance(&c));
            out.write(stem, &c, &prov)?;
        }
        Ok(())
    }
}

struct Fig2;

impl Recipe for Fig2 {
    fn name(&self) -> &'static str {
        "fig2"
    }
    fn describe(&self) -> &'static str {
        "square-root-of-time rule vs simulated conditional variance at a 2-month horizon, three regimes"
    }
    fn run(&self, ctx: &RecipeContext, out: &mut Output) -> Result<()> {
        let t = Horizon::years(2.0 / 12.0)?;
        let cases = [
            ("fig2_strong_reversion", 16.0, 0.3, -0.7),
            ("fig2_strong_interaction", 1.0, 0.3, -0.9),
            ("fig2_weak_effects", 1.0, 0.3, -0.1),
        ];
        for (k, (stem, kappa, sigma, rho)) in cases.into_iter().enumerate() {
            let p = HestonParams::allowing_feller_violation(0.0, kappa, 0.04, sigma, rho)?;
            let seed = svol_core::rng::derive_seed(ctx.seed, k as u64);
            let c = run_srtr(&p, t, &[], DEFAULT_V0_POINTS, SRTR_PATHS, DEFAULT_STEPS_PER_YEAR, seed)?;
            log::info!("{stem}: slope ratio {:.3}, mean gap {:.3e} ± {:.1e}", c.slope_ratio.value, c.mean_gap.value, c.mean_gap.se);
            out.write(stem, &c, &srtr_provenance(&c))?;
        }
        Ok(())
    }
}

struct Fig3;

impl Recipe for Fig3 {
    fn name(&self) -> &'static str {
        "fig3"
    }
    fn describe(&self) -> &'static str {
        "marginal variance vs EIV by horizon for the five size portfolios (needs Portfolios_Formed_on_ME_daily.csv)"
    }
    fn run(&self, ctx: &RecipeContext, out: &mut Output) -> Result<()> {
        let (series, prov) = size_panel(ctx)?;
        let all = dynamics_per_series(&series, &DYNAMICS_HORIZONS, 1, AggregationMode::Overlap, &default_bootstrap(), ctx.seed)?;
        for (s, d) in series.iter().zip(&all) {
            let mut p = prov.clone();
            p.push(format!("portfolio: {}", portfolio_label(s.label())));
            p.extend(dynamics_provenance(d, s.label()));
            out.write(&format!("fig3_{}", slug(s.label())), d, &p)?;
        }
        Ok(())
    }
}

struct Table1;

impl Recipe for Table1 {
    fn name(&self) -> &'static str {
        "table1"
    }
    fn describe(&self) -> &'static str {
        "EIV_25 and RIV_25 of the five size portfolios (needs Portfolios_Formed_on_ME_daily.csv)"
    }
    fn run(&self, ctx: &RecipeContext, out: &mut Output) -> Result<()> {
        let (report, mut prov) = size_report_for(ctx)?;
        let mut t = LabeledTable::new(&["portfolio", "eiv_25", "riv_25"]);
        for r in &report.rows {
            t.push(portfolio_label(&r.label), vec![r.eiv_annualized, r.riv]);
        }
        let riv: Vec<f64> = report.rows.iter().map(|r| r.riv).collect();
        let line = spot_line("RIV_25", ends(&riv), RIV25_REFERENCE);
        log::info!("{line}");
        prov.push(line);
        out.write("table1", &t, &prov)?;
        out.write_json("table1_detail", &report, &prov)?;
        Ok(())
    }
}

struct Table2;

impl Recipe for Table2 {
    fn name(&self) -> &'static str {
        "table2"
    }
    fn describe(&self) -> &'static str {
        "1-day annualized variance, Hinkley skewness and Crow-Siddiqui kurtosis of the size portfolios (needs Portfolios_Formed_on_ME_daily.csv)"
    }
    fn run(&self, ctx: &RecipeContext, out: &mut Output) -> Result<()> {
        let (report, mut prov) = size_report_for(ctx)?;
        let mut t = LabeledTable::new(&["portfolio", "var_annualized_1d", "skewness_h", "excess_kurtosis_cs"]);
        for r in &report.rows {
            t.push(portfolio_label(&r.label), vec![r.var1_annualized, r.hinkley_skewness, r.cs_excess_kurtosis]);
        }
        let cs: Vec<f64> = report.rows.iter().map(|r| r.cs_excess_kurtosis).collect();
        let line = spot_line("Crow-Siddiqui excess kurtosis", ends(&cs), CS_REFERENCE);
        log::info!("{line}");
        prov.push(line);
        out.write("table2", &t, &prov)?;
        out.write_json("table2_detail", &report, &prov)?;
        Ok(())
    }
}

struct Fig4To6;

impl Recipe for Fig4To6 {
    fn name(&self) -> &'static str {
        "fig4-6"
    }
    fn describe(&self) -> &'static str {
        "GH fit, stride-21 KS test and variance dynamics of a daily index series (needs --data or sp500_daily.csv, plus --start and --end)"
    }
    fn run(&self, ctx: &RecipeContext, out: &mut Output) -> Result<()> {
        let (Some(start), Some(end)) = (ctx.args.start.as_deref(), ctx.args.end.as_deref()) else {
            return Err(usage("recipe 'fig4-6' needs an explicit sample period: pass --start and --end"));
        };
        let (start, end) = (date_arg("start", Some(start))?, date_arg("end", Some(end))?);
        let path = locate(ctx, INDEX_FILE, "a daily index file")?;
        let mut spec = DatasetSpec::new(&path, ctx.args.kind.map_or(DatasetKind::PricesCsv, Into::into)).with_range(start, end);
        if !ctx.args.columns.is_empty() {
            spec = spec.with_columns(ctx.args.columns.iter().cloned());
        }
        spec.validate()?;
        let panel = load_dataset(&spec)?;
        if panel.series.len() > 1 {
            log::warn!("{} series in {}; using '{}'", panel.series.len(), path.display(), panel.series[0].label());
        }
        let s = &panel.series[0];
        let mut prov = vec![
            format!("data: {} series '{}'", path.file_name().unwrap_or_default().to_string_lossy(), s.label()),
            format!("date range: {} to {}", start.expect("checked"), end.expect("checked")),
        ];

        let fit = svol_core::dist::fit_gh_mle(s.returns(), None)?;
        let mut fp = prov.clone();
        fp.extend(fit_provenance(&fit));
        out.write_json("fig4_gh_fit", &fit, &fp)?;
        out.write("fig4_density", &fit_density_table(s.returns(), &fit, FIT_BINS)?, &fp)?;

        let (ks, cdf) = ks_tables(s.returns(), &fit.params, KS_STRIDE)?;
        fp.push(format!("KS stride: {KS_STRIDE}"));
        out.write("fig5_ks", &ks, &fp)?;
        out.write("fig5_cdf", &cdf, &fp)?;

        let d = dynamics_per_series(
            std::slice::from_ref(s),
            &DYNAMICS_HORIZONS,
            1,
            AggregationMode::Overlap,
            &default_bootstrap(),
            ctx.seed,
        )?
        .remove(0);
        prov.extend(dynamics_provenance(&d, s.label()));
        out.write("fig6_interaction", &d, &prov)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_holds_every_recipe() {
        let r = RecipeRegistry::default();
        let names: Vec<_> = r.iter().map(|r| r.name()).collect();
        assert_eq!(names, ["fig1", "fig2", "fig3", "fig4-6", "table1", "table2"]);
        assert!(r.get("fig7").is_none());
    }

    #[test]
    fn labels_and_spot_lines() {
        assert_eq!(portfolio_label("Lo 20"), "0%-20%");
        assert_eq!(portfolio_label("hi 20"), "80%-100%");
        assert_eq!(portfolio_label("Dec 3"), "Dec 3");
        assert!(spot_line("x", [0.5, 0.06], RIV25_REFERENCE).ends_with("yes)"));
        assert!(spot_line("x", [0.4, 0.06], RIV25_REFERENCE).ends_with("no)"));
    }
}

use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

use svol_core::dist::{fit_gh_mle, ks_test, GhFit, GhParams, KsResult};
use svol_core::estimators::{
    empirical_quantile, size_report, variance_dynamics, AggregationMode, BootstrapConfig, ReturnSeries, SizeReport,
    SizeReportOptions, VarianceDynamics,
};
use svol_core::heston::{self, compare_densities, DensityComparison, HestonParams};
use svol_core::io::{read_report, Table};
use svol_core::rng::derive_seed;
use svol_core::sim::{
    conditional_variance_of, default_v0_grid, emiv_mc, simulate_svm, srtr_comparison, viv_mc, ModelRegistry,
    ReturnDynamics, SimConfig, SrtrComparison, V0Mode,
};
use svol_core::stats::{normal_pdf, sample_variance};
use svol_core::Horizon;

use crate::args::*;
use crate::data::slug;
use crate::error::{usage, Result};
use crate::output::{LabeledTable, Output};
use crate::recipes::RecipeRegistry;

/// Panels of the tabulated GH CDF used by the KS test.
const CDF_PANELS: usize = 3000;
const CDF_WIDTH_SD: f64 = 30.0;

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let name = match &cli.command {
        Command::Moments(_) => "moments",
        Command::DensityCompare(_) => "density-compare",
        Command::Simulate(_) => "simulate",
        Command::Interaction(_) => "interaction",
        Command::SizeReport(_) => "size-report",
        Command::Srtr(_) => "srtr",
        Command::FitGh(_) => "fit-gh",
        Command::KsTest(_) => "ks-test",
        Command::Reproduce(_) => "reproduce",
    };
    let mut out = Output::new(cli.out.clone(), cli.format, name, cli.seed);
    match &cli.command {
        Command::Moments(a) => moments(a, &mut out)?,
        Command::DensityCompare(a) => density_compare(a, &mut out)?,
        Command::Simulate(a) => simulate(a, cli.seed, &mut out)?,
        Command::Interaction(a) => interaction(a, cli.seed, &mut out)?,
        Command::SizeReport(a) => size_report_cmd(a, cli.seed, &mut out)?,
        Command::Srtr(a) => srtr(a, cli.seed, &mut out)?,
        Command::FitGh(a) => fit_gh(a, &mut out)?,
        Command::KsTest(a) => ks(a, &mut out)?,
        Command::Reproduce(a) => {
            let reg = RecipeRegistry::default();
            if a.list {
                for r in reg.iter() {
                    println!("{:<8} {}", r.name(), r.describe());
                }
                return Ok(Vec::new());
            }
            let recipe = a.recipe.as_deref().expect("clap enforces --recipe");
            let mut sub = Output::new(cli.out.join(recipe), cli.format, &format!("reproduce {recipe}"), cli.seed);
            reg.run(recipe, a, cli.seed, &mut sub)?;
            return Ok(sub.into_written());
        }
    }
    Ok(out.into_written())
}

impl CoeffArgs {
    pub fn params(&self, rho: f64) -> Result<HestonParams> {
        let p = if self.allow_feller_violation {
            HestonParams::allowing_feller_violation(self.r, self.kappa, self.theta, self.sigma, rho)?
        } else {
            HestonParams::new(self.r, self.kappa, self.theta, self.sigma, rho)?
        };
        Ok(p)
    }
}

pub fn model_provenance(p: &HestonParams) -> String {
    format!(
        "model: r = {}, kappa = {}, theta = {}, sigma = {}, rho = {}",
        p.r(),
        p.kappa(),
        p.theta(),
        p.sigma(),
        p.rho()
    )
}

fn horizon(t: Option<f64>, days: Option<f64>, default: Horizon) -> Result<Horizon> {
    Ok(match (t, days) {
        (Some(t), _) => Horizon::years(t)?,
        (None, Some(d)) => Horizon::trading_days(d)?,
        (None, None) => default,
    })
}

fn moments(a: &MomentsArgs, out: &mut Output) -> Result<()> {
    let p = a.coeff.params(a.rho)?;
    let horizons: Vec<Horizon> = if !a.t.is_empty() {
        a.t.iter().map(|&t| Horizon::years(t)).collect::<svol_core::Result<_>>()?
    } else if !a.days.is_empty() {
        a.days.iter().map(|&d| Horizon::trading_days(d)).collect::<svol_core::Result<_>>()?
    } else {
        [1.0, 5.0, 25.0, 125.0, 252.0].iter().map(|&d| Horizon::trading_days(d)).collect::<svol_core::Result<_>>()?
    };
    let mut table = Table::new([
        "t_years",
        "days",
        "mean",
        "variance",
        "eiv",
        "viv",
        "emiv",
        "riv",
        "skewness",
        "excess_kurtosis",
        "skewness_short",
        "excess_kurtosis_short",
    ]);
    for t in horizons {
        let d = heston::marginal_variance(&p, t);
        let m = heston::moment_set(&p, t);
        let s = heston::short_horizon_moments(&p, t);
        table.push(vec![
            t.t(),
            t.in_trading_days(),
            m.mean,
            d.total,
            d.eiv,
            d.viv,
            d.emiv,
            d.riv(),
            m.skewness,
            m.excess_kurtosis,
            s.skewness,
            s.excess_kurtosis,
        ]);
    }
    out.write("moments", &table, &[model_provenance(&p)])?;
    Ok(())
}

pub fn density_provenance(c: &DensityComparison) -> Vec<String> {
    vec![
        format!("horizon: {} years ({} trading days)", c.horizon.t(), c.horizon.in_trading_days()),
        format!("grid: {} points over the widest mean ± {} sd", c.grid.len(), c.width_sd),
        format!("sup gap first vs last curve / peak: {}", c.relative_gap()),
    ]
}

fn density_compare(a: &DensityCompareArgs, out: &mut Output) -> Result<()> {
    let rho0 = *a.rho_list.first().ok_or_else(|| usage("--rho-list needs at least one value"))?;
    let p = a.coeff.params(rho0)?;
    let t = horizon(a.t, a.days, Horizon::trading_days(5.0)?)?;
    let c = compare_densities(&p, &a.rho_list, t, a.grid, a.width_sd)?;
    log::info!("sup gap relative to peak: {:.4}", c.relative_gap());
    let mut prov = vec![format!(
        "model: r = {}, kappa = {}, theta = {}, sigma = {}, rho in {:?}",
        p.r(),
        p.kappa(),
        p.theta(),
        p.sigma(),
        a.rho_list
    )];
    prov.extend(density_provenance(&c));
    out.write("density_compare", &c, &prov)?;
    Ok(())
}

fn parse_params(pairs: &[String]) -> Result<Map<String, Value>> {
    let mut m = Map::new();
    for kv in pairs {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--param expects key=value, got '{kv}'")))?;
        let v = v.trim();
        let value = if let Ok(x) = v.parse::<f64>() {
            serde_json::Number::from_f64(x).map(Value::Number).ok_or_else(|| usage(format!("--param {k}: not finite")))?
        } else if let Ok(b) = v.parse::<bool>() {
            Value::Bool(b)
        } else {
            Value::String(v.to_string())
        };
        m.insert(k.trim().to_string(), value);
    }
    Ok(m)
}

fn simulate(a: &SimulateArgs, seed: u64, out: &mut Output) -> Result<()> {
    let params = parse_params(&a.param)?;
    let model = ModelRegistry::default().build(&a.model, &Value::Object(params.clone()))?;
    let from_params = |k: &str| params.get(k).and_then(Value::as_f64);
    let dynamics = if a.variance_only {
        None
    } else {
        a.rho.or_else(|| from_params("rho")).map(|rho| ReturnDynamics { r: a.r.or_else(|| from_params("r")).unwrap_or(0.0), rho })
    };
    let cfg = SimConfig::new(a.paths, Horizon::years(a.t)?, seed)?.with_steps_per_year(a.steps_per_year)?;
    let v0 = a.v0.map_or(V0Mode::Stationary, V0Mode::Fixed);
    let bundle = simulate_svm(model.as_ref(), dynamics, v0, &cfg)?;

    let mut prov = vec![
        format!("model: {} {}", a.model, Value::Object(params)),
        format!("paths: {}, steps per year: {}, horizon: {} years", cfg.n_paths(), cfg.steps_per_year(), a.t),
        match v0 {
            V0Mode::Stationary => "v0: stationary draw".to_string(),
            V0Mode::Fixed(v) => format!("v0: {v}"),
        },
    ];
    if let Some(d) = dynamics {
        prov.push(format!("return dynamics: r = {}, rho = {}", d.r, d.rho));
    }
    out.write("simulate_summary", &bundle.summary()?, &prov)?;

    let rho = dynamics.map_or(0.0, |d| d.rho);
    let mut oracles = LabeledTable::new(&["statistic", "value", "se"]);
    let viv = viv_mc(&bundle)?;
    oracles.push("viv", vec![viv.value, viv.se]);
    if dynamics.is_some() {
        let e = emiv_mc(&bundle, rho)?;
        oracles.push("emiv", vec![e.value, e.se]);
    }
    if matches!(v0, V0Mode::Fixed(_)) {
        let c = conditional_variance_of(&bundle, rho)?;
        oracles.push("conditional_variance", vec![c.value, c.se]);
    }
    out.write("simulate_oracles", &oracles, &prov)?;

    if a.raw {
        let p = out.claim("paths.bin")?;
        bundle.write_raw(&p)?;
    }
    Ok(())
}

impl BootstrapArgs {
    pub fn config(&self, seed: u64) -> BootstrapConfig {
        BootstrapConfig { block: self.block, resamples: self.resamples, confidence: self.confidence, seed }
    }
}

pub fn dynamics_provenance(d: &VarianceDynamics, label: &str) -> Vec<String> {
    vec![
        format!("series: {label}, {} observations", d.n_obs),
        format!("reference horizon s: {} day(s), windows: {:?}", d.ref_horizon, d.mode),
        format!(
            "bootstrap: moving blocks of {} days, {} resamples, {} coverage, seed {}",
            d.bootstrap.block, d.bootstrap.resamples, d.bootstrap.confidence, d.bootstrap.seed
        ),
    ]
}

/// One [`VarianceDynamics`] per series; series `k` bootstraps with `derive_seed(seed, k)`.
pub fn dynamics_per_series(
    series: &[ReturnSeries],
    horizons: &[usize],
    ref_horizon: usize,
    mode: AggregationMode,
    boot: &BootstrapArgs,
    seed: u64,
) -> Result<Vec<VarianceDynamics>> {
    series
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let cfg = boot.config(derive_seed(seed, k as u64));
            Ok(variance_dynamics(s.returns(), horizons, ref_horizon, mode, &cfg)?)
        })
        .collect()
}

fn interaction(a: &InteractionArgs, seed: u64, out: &mut Output) -> Result<()> {
    let series = a.data.load()?;
    let all = dynamics_per_series(&series, &a.horizons, a.ref_horizon, a.mode, &a.bootstrap, seed)?;
    for (s, d) in series.iter().zip(&all) {
        log::info!(
            "{}: RIV {:?}",
            s.label(),
            d.horizons.iter().zip(&d.riv).map(|(h, r)| format!("{h}d {r:.3}")).collect::<Vec<_>>()
        );
        let mut prov = a.data.provenance();
        prov.extend(dynamics_provenance(d, s.label()));
        out.write(&format!("interaction_{}", slug(s.label())), d, &prov)?;
    }
    Ok(())
}

pub fn size_options(horizon_days: usize, ref_horizon: usize, mode: AggregationMode, alpha: f64, boot: &BootstrapArgs, seed: u64) -> SizeReportOptions {
    SizeReportOptions { horizon_days, ref_horizon, mode, bootstrap: boot.config(seed), hinkley_alpha: alpha }
}

pub fn size_provenance(r: &SizeReport) -> Vec<String> {
    let o = &r.options;
    vec![
        format!("EIV/RIV horizon: {} days, reference horizon s: {} day(s), windows: {:?}", o.horizon_days, o.ref_horizon, o.mode),
        format!("Hinkley alpha: {}, Crow-Siddiqui centre: {}", o.hinkley_alpha, svol_core::estimators::CS_CENTER),
        format!(
            "bootstrap: moving blocks of {} days, {} resamples, {} coverage",
            o.bootstrap.block, o.bootstrap.resamples, o.bootstrap.confidence
        ),
    ]
}

fn size_report_cmd(a: &SizeReportArgs, seed: u64, out: &mut Output) -> Result<()> {
    let series = a.data.load()?;
    let opts = size_options(a.horizon_days, a.ref_horizon, a.mode, a.hinkley_alpha, &a.bootstrap, seed);
    let r = size_report(&series, &opts)?;
    let mut prov = a.data.provenance();
    prov.extend(size_provenance(&r));
    out.write("size_report", &r, &prov)?;
    Ok(())
}

pub fn srtr_provenance(c: &SrtrComparison) -> Vec<String> {
    vec![
        model_provenance(&c.params),
        format!("horizon: {} years, paths per v0: {}", c.horizon.t(), c.n_paths),
        format!("slope ratio (mc / srtr): {} ± {}", c.slope_ratio.value, c.slope_ratio.se),
        format!("stationary-weighted mean of mc - srtr: {} ± {}", c.mean_gap.value, c.mean_gap.se),
    ]
}

pub fn run_srtr(p: &HestonParams, t: Horizon, grid: &[f64], points: usize, paths: usize, spy: u32, seed: u64) -> Result<SrtrComparison> {
    let grid = if grid.is_empty() { default_v0_grid(p, points)? } else { grid.to_vec() };
    let cfg = SimConfig::new(paths, t, seed)?.with_steps_per_year(spy)?;
    Ok(srtr_comparison(p, t, &grid, &cfg)?)
}

fn srtr(a: &SrtrArgs, seed: u64, out: &mut Output) -> Result<()> {
    let p = a.coeff.params(a.rho)?;
    let t = horizon(a.t, a.days, Horizon::years(2.0 / 12.0)?)?;
    let c = run_srtr(&p, t, &a.v0_grid, a.points, a.paths, a.steps_per_year, seed)?;
    log::info!("slope ratio {:.4}, mean gap {:.3e} ± {:.1e}", c.slope_ratio.value, c.mean_gap.value, c.mean_gap.se);
    out.write("srtr", &c, &srtr_provenance(&c))?;
    Ok(())
}

/// Histogram of `data` with the fitted GH and the moment-matched normal density at bin centres.
pub fn fit_density_table(data: &[f64], fit: &GhFit, bins: usize) -> Result<Table> {
    if bins == 0 {
        return Err(usage("--bins must be positive"));
    }
    let lo = empirical_quantile(data, 0.001)?;
    let hi = empirical_quantile(data, 0.999)?;
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in data {
        if x >= lo && x < hi {
            counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
        }
    }
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let var = sample_variance(data);
    let n = data.len() as f64;
    let mut t = Table::new(["x", "empirical_density", "gh_density", "normal_density"]);
    for (i, &c) in counts.iter().enumerate() {
        let x = lo + (i as f64 + 0.5) * w;
        t.push(vec![x, c as f64 / (n * w), fit.params.pdf(x), normal_pdf(x, mean, var)]);
    }
    Ok(t)
}

pub fn fit_provenance(f: &GhFit) -> Vec<String> {
    vec![
        format!("observations: {}, log-likelihood: {}, gradient norm: {}", f.n, f.log_likelihood, f.gradient_norm),
        format!("restarts: {}", f.restarts),
    ]
}

fn stem(base: &str, label: &str, n: usize) -> String {
    if n == 1 { base.to_string() } else { format!("{base}_{}", slug(label)) }
}

fn fit_gh(a: &FitGhArgs, out: &mut Output) -> Result<()> {
    let series = a.data.load()?;
    for s in &series {
        let fit = fit_gh_mle(s.returns(), None)?;
        let mut prov = a.data.provenance();
        prov.push(format!("series: {}", s.label()));
        prov.extend(fit_provenance(&fit));
        out.write_json(&stem("gh_fit", s.label(), series.len()), &fit, &prov)?;
        let table = fit_density_table(s.returns(), &fit, a.bins)?;
        out.write(&stem("gh_fit_density", s.label(), series.len()), &table, &prov)?;
    }
    Ok(())
}

fn load_gh_params(path: &Path) -> Result<GhParams> {
    if let Ok(fit) = read_report::<GhFit>(path) {
        return Ok(fit.params);
    }
    let text = std::fs::read_to_string(path).map_err(|e| svol_core::Error::Io { path: path.to_path_buf(), source: e })?;
    Ok(serde_json::from_str::<GhParams>(&text).map_err(svol_core::Error::from)?)
}

/// KS result and the subsample's empirical CDF next to the model CDF.
pub fn ks_tables(data: &[f64], params: &GhParams, stride: usize) -> Result<(KsResult, Table)> {
    let cdf = params.cdf_table(CDF_WIDTH_SD, CDF_PANELS)?;
    let res = ks_test(data, |x| cdf.eval(x), stride)?;
    let mut sub: Vec<f64> = data.iter().step_by(stride).copied().collect();
    sub.sort_by(f64::total_cmp);
    let n = sub.len() as f64;
    let mut t = Table::new(["x", "empirical_cdf", "gh_cdf"]);
    for (i, &x) in sub.iter().enumerate() {
        t.push(vec![x, (i + 1) as f64 / n, cdf.eval(x)]);
    }
    Ok((res, t))
}

fn ks(a: &KsTestArgs, out: &mut Output) -> Result<()> {
    let series = a.data.load()?;
    let given = a.params.as_deref().map(load_gh_params).transpose()?;
    for s in &series {
        let params = match given {
            Some(p) => p,
            None => fit_gh_mle(s.returns(), None)?.params,
        };
        let (res, table) = ks_tables(s.returns(), &params, a.stride)?;
        log::info!("{}: D = {:.4}, p = {:.4}, n = {}", s.label(), res.statistic, res.p_value, res.n_effective);
        let mut prov = a.data.provenance();
        prov.push(format!("series: {}, stride: {}", s.label(), a.stride));
        prov.push(format!("gh: {}", serde_json::to_string(&params).map_err(svol_core::Error::from)?));
        out.write(&stem("ks_test", s.label(), series.len()), &res, &prov)?;
        out.write(&stem("ks_cdf", s.label(), series.len()), &table, &prov)?;
    }
    Ok(())
}

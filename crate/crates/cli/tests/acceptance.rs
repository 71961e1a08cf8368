//! Acceptance suite. Prints one PASS/FAIL line per criterion. With
//! `SVOL_ACCEPTANCE_STRICT=1` the process exits non-zero when any criterion
//! fails. Positional arguments select criteria by number
//! (`cargo test --test acceptance -- 3 5`).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use chrono::{Datelike, NaiveDate};
use rand::Rng;
use rand_distr::StandardNormal;
use svol_core::dist::{fit_gh_mle, gh_sample, ks_test, GhParams};
use svol_core::estimators::{
    crow_siddiqui_kurtosis, hinkley_skewness, variance_dynamics, AggregationMode, BootstrapConfig,
};
use svol_core::heston::{self, compare_densities, default_grid, marginal_density, HestonParams};
use svol_core::io::{load_dataset, DatasetKind, DatasetSpec};
use svol_core::quad::Integrator;
use svol_core::rng::{derive_seed, stream_rng};
use svol_core::sim::{
    default_v0_grid, emiv_mc, simulate_heston, simulate_heston_daily, simulate_sorensen, srtr_comparison, viv_mc,
    SimConfig, SorensenParams, V0Mode,
};
use svol_core::stats::{normal_pdf, sample_moments, Estimate};
use svol_core::Horizon;

const SEED: u64 = 2019;
const BIN: &str = env!("CARGO_BIN_EXE_svol");

struct Outcome {
    pass: bool,
    summary: String,
    detail: String,
}

type Check = fn() -> Result<Outcome, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

// C1

fn c1_closed_form_vs_mc() -> Result<Outcome, String> {
    let mut detail = String::new();
    let (mut total, mut bad, mut worst) = (0, 0, 0.0f64);
    let mut case = 0u64;
    for kappa in [1.0, 2.0, 16.0] {
        for sigma in [0.02, 0.3, 0.8] {
            let p = HestonParams::allowing_feller_violation(0.0, kappa, 0.04, sigma, -0.7).map_err(err)?;
            for t in [5.0 / 252.0, 1.0] {
                let h = Horizon::years(t).map_err(err)?;
                let cfg = SimConfig::new(1_000_000, h, derive_seed(SEED, case))
                    .and_then(|c| c.with_steps_per_year(2016))
                    .map_err(err)?;
                case += 1;
                let b = simulate_heston(&p, V0Mode::Stationary, &cfg).map_err(err)?;
                let m = sample_moments(&b.x).map_err(err)?;
                let decomposition = heston::marginal_variance(&p, h);
                let checks: [(&str, Estimate, f64); 6] = [
                    ("mean", m.mean, heston::marginal_mean(&p, h)),
                    ("variance", m.variance, decomposition.total),
                    ("emiv", emiv_mc(&b, p.rho()).map_err(err)?, decomposition.emiv),
                    ("viv", viv_mc(&b).map_err(err)?, decomposition.viv),
                    ("skewness", m.skewness, heston::skewness(&p, h)),
                    ("kurtosis", m.kurtosis, heston::kurtosis(&p, h)),
                ];
                for (name, est, exact) in checks {
                    total += 1;
                    let z = est.z_score(exact);
                    worst = worst.max(z.abs());
                    if !est.within(exact, 3.0) {
                        bad += 1;
                        let _ = writeln!(
                            detail,
                            "kappa={kappa} sigma={sigma} t={t:.4} {name}: mc {:.6e} ± {:.2e} vs {exact:.6e} (z = {z:.2})",
                            est.value, est.se
                        );
                    }
                }
            }
        }
    }
    Ok(Outcome {
        pass: bad == 0,
        summary: format!("{}/{total} within 3 SE, max |z| = {worst:.2}", total - bad),
        detail,
    })
}

// C2

fn c2_density_consistency() -> Result<Outcome, String> {
    let mut detail = String::new();
    let (mut worst_mass, mut worst_rel) = (0.0f64, 0.0f64);
    for (kappa, sigma) in [(2.0, 0.3), (16.0, 0.8), (1.0, 0.02)] {
        let p = HestonParams::new(0.0, kappa, 0.04, sigma, -0.7).map_err(err)?;
        for days in [5.0, 25.0, 252.0] {
            let h = Horizon::trading_days(days).map_err(err)?;
            let grid = default_grid(&p, h, 4001, 30.0);
            let c = marginal_density(&p, h, &grid).map_err(err)?;
            let mass = (c.integral() - 1.0).abs();
            let [mean, var, m3, m4] = c.moments();
            let exact = [
                heston::marginal_mean(&p, h),
                heston::marginal_variance(&p, h).total,
                heston::third_central_moment(&p, h),
                heston::fourth_central_moment(&p, h),
            ];
            let rel: Vec<f64> = [mean, var, m3, m4].iter().zip(&exact).map(|(a, b)| ((a - b) / b).abs()).collect();
            let r = rel.iter().cloned().fold(0.0, f64::max);
            worst_mass = worst_mass.max(mass);
            worst_rel = worst_rel.max(r);
            if mass > 1e-4 || r > 1e-3 {
                let _ = writeln!(detail, "kappa={kappa} sigma={sigma} days={days}: |mass-1| = {mass:.2e}, rel errors {}", sci(&rel));
            }
        }
    }
    Ok(Outcome {
        pass: worst_mass <= 1e-4 && worst_rel <= 1e-3,
        summary: format!("max |mass - 1| = {worst_mass:.2e}, max moment rel error = {worst_rel:.2e}"),
        detail,
    })
}

// C3

fn c3_fig1() -> Result<Outcome, String> {
    let h = Horizon::trading_days(5.0).map_err(err)?;
    let gap = |kappa: f64, sigma: f64| -> Result<f64, String> {
        let p = HestonParams::new(0.0, kappa, 0.04, sigma, 0.0).map_err(err)?;
        Ok(compare_densities(&p, &[0.0, -1.0], h, 801, 10.0).map_err(err)?.relative_gap())
    };
    let strong = gap(16.0, 0.8)?;
    let weak = gap(1.0, 0.02)?;
    Ok(Outcome {
        pass: strong > 0.05 && weak < 0.005,
        summary: format!("gap/peak strong reversion {strong:.4} (> 0.05), weak reversion {weak:.5} (< 0.005)"),
        detail: String::new(),
    })
}

// C4

fn c4_short_horizon() -> Result<Outcome, String> {
    let mut detail = String::new();
    let mut pass = true;
    for (kappa, sigma) in [(2.0, 0.3), (16.0, 0.8), (1.0, 0.02)] {
        let p = HestonParams::new(0.0, kappa, 0.04, sigma, -0.7).map_err(err)?;
        let mut skew = Vec::new();
        let mut kurt = Vec::new();
        for t in [1e-2, 1e-3, 1e-4] {
            let h = Horizon::years(t).map_err(err)?;
            let exact = heston::moment_set(&p, h);
            let approx = heston::short_horizon_moments(&p, h);
            skew.push(((approx.skewness - exact.skewness) / exact.skewness).abs());
            kurt.push(((approx.excess_kurtosis - exact.excess_kurtosis) / exact.excess_kurtosis).abs());
        }
        let ok = skew.windows(2).all(|w| w[1] < w[0]) && kurt.windows(2).all(|w| w[1] < w[0]);
        pass &= ok;
        let _ = writeln!(detail, "kappa={kappa} sigma={sigma}: skewness {}, excess kurtosis {} {}", sci(&skew), sci(&kurt), yes(ok));
    }
    Ok(Outcome { pass, summary: "relative errors at t = 1e-2, 1e-3, 1e-4 decrease".into(), detail })
}

// C5

fn c5_gh_mixture() -> Result<Outcome, String> {
    let mut rng = stream_rng(SEED, 5);
    let q = Integrator::new(1e-16, 1e-12);
    let mut detail = String::new();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let lambda = rng.random_range(-3.0..3.0);
        let alpha: f64 = rng.random_range(0.5..4.0);
        let beta = rng.random_range(-0.9..0.9) * alpha;
        let delta = rng.random_range(0.3..2.0);
        let mu = rng.random_range(-1.0..1.0);
        let h = GhParams::new(lambda, alpha, beta, delta, mu).map_err(err)?;
        let g = h.mixing();
        let mut sup = 0.0f64;
        for i in 0..=120 {
            let x = mu - 6.0 * delta + (12.0 * delta) * i as f64 / 120.0;
            let mix = q
                .integrate_to_inf(|v| if v > 0.0 { normal_pdf(x, mu + beta * v, v) * g.pdf(v) } else { 0.0 }, 0.0)
                .map_err(err)?;
            sup = sup.max((mix - h.pdf(x)).abs());
        }
        worst = worst.max(sup);
        let _ = writeln!(detail, "GH({lambda:.3}, {alpha:.3}, {beta:.3}, {delta:.3}, {mu:.3}): sup diff {sup:.2e}");
    }
    Ok(Outcome { pass: worst <= 1e-6, summary: format!("max sup-norm difference {worst:.2e} over 10 sets"), detail })
}

// C6

fn c6_sorensen_stationarity() -> Result<Outcome, String> {
    let sp = SorensenParams::new(0.5, 1.5, 0.2, 8.0, 0.5).map_err(err)?;
    let law = sp.stationary_law();
    let h = Horizon::years(2.0).map_err(err)?;
    let cfg = SimConfig::new(100_000, h, SEED).and_then(|c| c.with_steps_per_year(2016)).map_err(err)?;
    let b = simulate_sorensen(&sp, V0Mode::Fixed(law.mean()), &cfg).map_err(err)?;
    let d = svol_core::dist::kolmogorov_distance(&b.v_terminal, |x| law.cdf(x));
    Ok(Outcome {
        pass: d < 0.02,
        summary: format!("KS distance {d:.4} (< 0.02) after a 2-year burn-in, 1e5 samples"),
        detail: String::new(),
    })
}

// C7

fn c7_mle_recovery() -> Result<Outcome, String> {
    let truth = GhParams::new(-0.5, 50.0, -5.0, 0.02, 0.0).map_err(err)?;
    let data = gh_sample(&truth, 100_000, SEED);
    let fit = fit_gh_mle(&data, None).map_err(err)?;
    let f = fit.params;
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let checks = [
        ("lambda", f.lambda(), rel(f.lambda(), -0.5) <= 0.1),
        ("alpha", f.alpha(), rel(f.alpha(), 50.0) <= 0.1),
        ("beta", f.beta(), (f.beta() + 5.0).abs() <= 1.0),
        ("delta", f.delta(), rel(f.delta(), 0.02) <= 0.1),
        ("mu", f.mu(), f.mu().abs() <= 0.002),
    ];
    let mut detail = String::new();
    for (name, v, ok) in checks {
        let _ = writeln!(detail, "{name} = {v:.5} {}", yes(ok));
    }
    let _ = writeln!(detail, "log-likelihood {:.2}, gradient norm {:.2e}", fit.log_likelihood, fit.gradient_norm);
    Ok(Outcome {
        pass: checks.iter().all(|c| c.2),
        summary: format!(
            "fit ({:.4}, {:.3}, {:.3}, {:.5}, {:.5}) vs (-0.5, 50, -5, 0.02, 0)",
            f.lambda(),
            f.alpha(),
            f.beta(),
            f.delta(),
            f.mu()
        ),
        detail,
    })
}

// C8

fn c8_ks_calibration() -> Result<Outcome, String> {
    let h = GhParams::new(-0.5, 50.0, -5.0, 0.02, 0.0).map_err(err)?;
    let cdf = h.cdf_table(30.0, 3000).map_err(err)?;
    let reps = 1000;
    let mut rejected = 0;
    for r in 0..reps {
        let data = gh_sample(&h, 24_000, derive_seed(SEED, r));
        if ks_test(&data, |x| cdf.eval(x), 21).map_err(err)?.rejects(0.05) {
            rejected += 1;
        }
    }
    let freq = rejected as f64 / reps as f64;
    Ok(Outcome {
        pass: (0.03..=0.07).contains(&freq),
        summary: format!("rejection frequency {freq:.3} over {reps} replications (in [0.03, 0.07])"),
        detail: String::new(),
    })
}

// C9

fn c9_estimator_consistency() -> Result<Outcome, String> {
    let horizons = [1usize, 5, 25, 125];
    let boot = BootstrapConfig::default().with_seed(SEED);
    let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).map_err(err)?;
    let returns = simulate_heston_daily(&p, 24_000, 8, SEED).map_err(err)?;
    let d = variance_dynamics(&returns, &horizons, 1, AggregationMode::Overlap, &boot).map_err(err)?;
    let mut detail = String::new();
    let mut pass = true;
    for h in [5usize, 25, 125] {
        let target = heston::marginal_variance(&p, Horizon::trading_days(h as f64).map_err(err)?).riv();
        let i = d.index_of(h).ok_or("missing horizon")?;
        let ok = d.riv_covers(h, target).ok_or("missing horizon")?;
        pass &= ok;
        let _ = writeln!(detail, "heston h={h}: riv {:.4} ± {:.4} vs closed form {target:.4} {}", d.riv[i], d.ci.riv[i], yes(ok));
    }
    let mut rng = stream_rng(SEED, 9);
    let iid: Vec<f64> = (0..24_000).map(|_| 0.01 * rng.sample::<f64, _>(StandardNormal)).collect();
    let d = variance_dynamics(&iid, &horizons, 1, AggregationMode::Overlap, &boot).map_err(err)?;
    for h in [5usize, 25, 125] {
        let i = d.index_of(h).ok_or("missing horizon")?;
        let ok = d.riv_covers(h, 0.0).ok_or("missing horizon")?;
        pass &= ok;
        let _ = writeln!(detail, "iid h={h}: riv {:.4} ± {:.4} vs 0 {}", d.riv[i], d.ci.riv[i], yes(ok));
    }
    Ok(Outcome { pass, summary: "RIV CIs cover the closed form (Heston) and 0 (i.i.d.) at 5, 25, 125 days".into(), detail })
}

// C10

fn c10_robust_moments() -> Result<Outcome, String> {
    let mut rng = stream_rng(SEED, 10);
    let z: Vec<f64> = (0..1_000_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let cs = crow_siddiqui_kurtosis(&z).map_err(err)?;
    let mut mirrored: Vec<f64> = z[..10_001].to_vec();
    mirrored.extend(z[..10_001].iter().map(|x| -x));
    let hk = hinkley_skewness(&mirrored, 0.05).map_err(err)?;
    Ok(Outcome {
        pass: (-0.03..=0.03).contains(&cs) && hk == 0.0,
        summary: format!("CS excess kurtosis {cs:.4} (|.| <= 0.03), Hinkley skewness of mirrored sample {hk:e} (== 0)"),
        detail: String::new(),
    })
}

// C11

fn c11_srtr() -> Result<Outcome, String> {
    let t = Horizon::years(2.0 / 12.0).map_err(err)?;
    let run = |p: &HestonParams, grid: &[f64], seed: u64| -> Result<_, String> {
        let cfg = SimConfig::new(100_000, t, seed).and_then(|c| c.with_steps_per_year(2016)).map_err(err)?;
        srtr_comparison(p, t, grid, &cfg).map_err(err)
    };
    let mut detail = String::new();

    let strong = HestonParams::new(0.0, 16.0, 0.04, 0.3, -0.7).map_err(err)?;
    let c = run(&strong, &default_v0_grid(&strong, 9).map_err(err)?, derive_seed(SEED, 0))?;
    let flat = c.slope_ratio.value + 3.0 * c.slope_ratio.se < 1.0;
    let _ = writeln!(detail, "strong reversion: slope ratio {:.4} ± {:.4} {}", c.slope_ratio.value, c.slope_ratio.se, yes(flat));

    let weak = HestonParams::allowing_feller_violation(0.0, 1.0, 0.04, 0.3, -0.9).map_err(err)?;
    let c = run(&weak, &default_v0_grid(&weak, 9).map_err(err)?, derive_seed(SEED, 1))?;
    let under = c.mean_gap.value - 3.0 * c.mean_gap.se > 0.0;
    let _ = writeln!(detail, "weak reversion, strong leverage: mean gap {:.4e} ± {:.2e} {}", c.mean_gap.value, c.mean_gap.se, yes(under));

    let flatline = HestonParams::new(0.0, 2.0, 0.04, 1e-14, -0.7).map_err(err)?;
    let c = run(&flatline, &[0.03, 0.04], derive_seed(SEED, 2))?;
    let row = &c.rows[1];
    let equal = row.mc.within(row.srtr, 3.0);
    let _ = writeln!(detail, "sigma -> 0, v0 = theta: mc {:.10e} ± {:.1e} vs {:.10e} {}", row.mc.value, row.mc.se, row.srtr, yes(equal));

    Ok(Outcome { pass: flat && under && equal, summary: "flattening, average under-prediction, sigma -> 0 equality".into(), detail })
}

// C12

fn weekdays(start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
    start.iter_days().take_while(|d| *d <= end).filter(|d| d.weekday().number_from_monday() <= 5).collect()
}

const FF_FILE: &str = "Portfolios_Formed_on_ME_daily.csv";
const FF_COLUMNS: [&str; 5] = ["Lo 20", "Qnt 2", "Qnt 3", "Qnt 4", "Hi 20"];
const FF_LABELS: [&str; 5] = ["0%-20%", "20%-40%", "40%-60%", "60%-80%", "80%-100%"];
/// Every `MISSING_EVERY`-th row of `Lo 20` is a -99.99 sentinel.
const MISSING_EVERY: usize = 5000;

static FIXTURE: OnceLock<Result<Fixture, String>> = OnceLock::new();

struct Fixture {
    dir: PathBuf,
    in_range: usize,
}

/// Writes a synthetic size-portfolio file covering 1926-07-01 .. 2019-02-08.
fn fixture() -> &'static Result<Fixture, String> {
    FIXTURE.get_or_init(|| {
        let dir = std::env::temp_dir().join(format!("svol-acceptance-{}", std::process::id()));
        std::fs::create_dir_all(&dir).map_err(err)?;
        let ymd = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).expect("valid date");
        let days = weekdays(ymd(1926, 7, 1), ymd(2019, 2, 8));
        let in_range = days.iter().filter(|d| **d <= ymd(2019, 1, 31)).count();
        let regimes = [(1.5, 0.05, 0.35, -0.8), (2.0, 0.04, 0.3, -0.7), (3.0, 0.035, 0.3, -0.6), (5.0, 0.03, 0.25, -0.5), (8.0, 0.03, 0.2, -0.3)];
        let mut cols = Vec::new();
        for (k, (kappa, theta, sigma, rho)) in regimes.into_iter().enumerate() {
            let p = HestonParams::new(0.0, kappa, theta, sigma, rho).map_err(err)?;
            cols.push(simulate_heston_daily(&p, days.len(), 8, derive_seed(SEED, 100 + k as u64)).map_err(err)?);
        }
        let pct = |x: f64| format!("{:.2}", 100.0 * x.exp_m1());
        let mut s = String::from("This file was created using a synthetic generator.\nThe portfolios are synthetic.\n\n");
        for (title, shift) in [("  Average Value Weighted Returns -- Daily", 0usize), ("  Average Equal Weighted Returns -- Daily", 1)] {
            s.push_str(title);
            s.push_str("\n,<= 0,Lo 30,Med 40,Hi 30,Lo 20,Qnt 2,Qnt 3,Qnt 4,Hi 20\n");
            for (i, d) in days.iter().enumerate() {
                let v = |c: usize| cols[c][(i + shift) % days.len()];
                let lo20 = if shift == 0 && i % MISSING_EVERY == MISSING_EVERY - 1 { "-99.99".to_string() } else { pct(v(0)) };
                let _ = writeln!(
                    s,
                    "{},-99.99,{},{},{},{lo20},{},{},{},{}",
                    d.format("%Y%m%d"),
                    pct(v(0)),
                    pct(v(2)),
                    pct(v(4)),
                    pct(v(1)),
                    pct(v(2)),
                    pct(v(3)),
                    pct(v(4))
                );
            }
            s.push('\n');
        }
        s.push_str("Copyright 2019 Synthetic\n");
        std::fs::write(dir.join(FF_FILE), s).map_err(err)?;
        Ok(Fixture { dir, in_range })
    })
}

fn svol(args: &[&str], data_dir: &Path, threads: &str) -> Result<std::process::Output, String> {
    Command::new(BIN)
        .args(args)
        .env("SVOL_DATA_DIR", data_dir)
        .env("RAYON_NUM_THREADS", threads)
        .env("SVOL_LOG", "warn")
        .output()
        .map_err(err)
}

/// Header and data rows of a report CSV, skipping `#` provenance lines.
fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>, Vec<String>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (comments, body): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    let mut rows = body.iter().map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>());
    let header = rows.next().ok_or("empty table")?;
    Ok((header, rows.collect(), comments.iter().map(|s| s.to_string()).collect()))
}

fn c12_tables() -> Result<Outcome, String> {
    let fx = fixture().as_ref().map_err(Clone::clone)?;
    let mut detail = String::new();
    let mut pass = true;

    let spec = DatasetSpec::new(fx.dir.join(FF_FILE), DatasetKind::FfDailyPercent)
        .with_columns(FF_COLUMNS)
        .with_range(NaiveDate::from_ymd_opt(1926, 7, 1), NaiveDate::from_ymd_opt(2019, 1, 31))
        .with_section("value weight");
    let panel = load_dataset(&spec).map_err(err)?;
    let counts: Vec<usize> = panel.series.iter().map(|s| s.len()).collect();
    let expect_lo = fx.in_range - fx.in_range / MISSING_EVERY;
    let ok = counts[0] == expect_lo && counts[1..].iter().all(|&n| n == fx.in_range);
    pass &= ok;
    let _ = writeln!(detail, "loaded {counts:?} returns ({} weekdays in range) {}", fx.in_range, yes(ok));

    let out = fx.dir.join("c12");
    let expected: [(&str, &[&str]); 2] = [
        ("table1", &["portfolio", "eiv_25", "riv_25"]),
        ("table2", &["portfolio", "var_annualized_1d", "skewness_h", "excess_kurtosis_cs"]),
    ];
    for (recipe, header) in expected {
        let o = svol(&["--out", out.to_str().ok_or("path")?, "reproduce", "--recipe", recipe], &fx.dir, "1")?;
        let code_ok = o.status.code() == Some(0);
        pass &= code_ok;
        if !code_ok {
            let _ = writeln!(detail, "{recipe}: exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
            continue;
        }
        let (h, rows, comments) = read_table(&out.join(recipe).join(format!("{recipe}.csv")))?;
        let labels: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
        let numeric = rows.iter().all(|r| r.len() == header.len() && r[1..].iter().all(|v| v.parse::<f64>().is_ok_and(f64::is_finite)));
        let ok = h == header && labels == FF_LABELS && numeric;
        pass &= ok;
        let _ = writeln!(detail, "{recipe}: columns {h:?}, rows {labels:?} {}", yes(ok));
        for c in comments.iter().filter(|c| c.contains("reference")) {
            let _ = writeln!(detail, "{recipe} spot values (synthetic data, not gated): {}", c.trim_start_matches("# "));
        }
    }

    let empty = fx.dir.join("empty");
    std::fs::create_dir_all(&empty).map_err(err)?;
    let o = svol(&["--out", out.to_str().ok_or("path")?, "reproduce", "--recipe", "table1"], &empty, "1")?;
    let stderr = String::from_utf8_lossy(&o.stderr);
    let ok = o.status.code() == Some(3) && stderr.contains(FF_FILE);
    pass &= ok;
    let _ = writeln!(detail, "missing data: exit {:?}, names the file: {} {}", o.status.code(), stderr.contains(FF_FILE), yes(ok));

    Ok(Outcome { pass, summary: "table1/table2 column structure on a synthetic size-portfolio file".into(), detail })
}

// C13

fn files(dir: &Path) -> Result<Vec<(PathBuf, Vec<u8>)>, String> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).map_err(err)? {
            let p = e.map_err(err)?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let bytes = std::fs::read(&p).map_err(err)?;
                out.push((p.strip_prefix(dir).map_err(err)?.to_path_buf(), bytes));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn c13_determinism() -> Result<Outcome, String> {
    let fx = fixture().as_ref().map_err(Clone::clone)?;
    let runs: [(&str, &[&str]); 4] = [
        ("reproduce fig2", &["reproduce", "--recipe", "fig2"]),
        ("reproduce table1", &["reproduce", "--recipe", "table1"]),
        ("simulate --raw", &["simulate", "--param", "kappa=2,theta=0.04,sigma=0.3", "--rho", "-0.7", "--paths", "50000", "--raw"]),
        ("interaction --format json", &["--format", "json", "interaction", "--data", FF_FILE, "--columns", "Lo 20,Hi 20", "--section", "value weight"]),
    ];
    let mut detail = String::new();
    let mut pass = true;
    for (k, (name, args)) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (rep, threads) in ["1", "1", "4"].iter().enumerate() {
            let out = fx.dir.join(format!("c13_{k}_{rep}"));
            let mut a = vec!["--out", out.to_str().ok_or("path")?];
            a.extend_from_slice(args);
            let o = svol(&a, &fx.dir, threads)?;
            if o.status.code() != Some(0) {
                return Err(format!("{name}: exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
            }
            outputs.push(files(&out)?);
        }
        let ok = !outputs[0].is_empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
        pass &= ok;
        let n: usize = outputs[0].iter().map(|f| f.1.len()).sum();
        let _ = writeln!(detail, "{name}: {} files, {n} bytes, identical over 2 runs and 1 vs 4 threads {}", outputs[0].len(), yes(ok));
    }
    Ok(Outcome { pass, summary: "seeded runs are byte-identical across repetitions and thread counts".into(), detail })
}

fn main() {
    let criteria: [(&str, Check); 13] = [
        ("closed-form moments vs Monte Carlo", c1_closed_form_vs_mc),
        ("Fourier density mass and moments", c2_density_consistency),
        ("leverage impact on 5-day densities", c3_fig1),
        ("short-horizon asymptotics", c4_short_horizon),
        ("GH normal-variance mixture identity", c5_gh_mixture),
        ("Sorensen stationary GIG law", c6_sorensen_stationarity),
        ("GH maximum-likelihood recovery", c7_mle_recovery),
        ("KS rejection rate under the null", c8_ks_calibration),
        ("empirical RIV consistency", c9_estimator_consistency),
        ("robust moment calibration", c10_robust_moments),
        ("square-root-of-time rule properties", c11_srtr),
        ("size-portfolio tables pipeline", c12_tables),
        ("determinism", c13_determinism),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome { pass: false, summary: format!("error: {e}"), detail: String::new() });
        let secs = start.elapsed().as_secs_f64();
        println!("{} C{n:<2} {name}: {} [{secs:.1} s]", if outcome.pass { "PASS" } else { "FAIL" }, outcome.summary);
        for line in outcome.detail.lines() {
            println!("        {line}");
        }
        if !outcome.pass {
            failed.push(n);
        }
    }
    if let Some(Ok(fx)) = FIXTURE.get() {
        let _ = std::fs::remove_dir_all(&fx.dir);
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        if std::env::var("SVOL_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}

use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};
use svol_core::estimators::*;
use svol_core::heston::{self, HestonParams};
use svol_core::rng::stream_rng;
use svol_core::sim::simulate_heston_daily;
use svol_core::stats::sample_moments;
use svol_core::{Error, Horizon};

fn gaussian(n: usize, sd: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    (0..n).map(|_| { let z: f64 = StandardNormal.sample(&mut rng); sd * z }).collect()
}

fn laplace(n: usize, seed: u64) -> Vec<f64> {
    use rand::Rng;
    let mut rng = stream_rng(seed, 0);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() - 0.5;
            -u.signum() * (1.0 - 2.0 * u.abs()).ln()
        })
        .collect()
}

fn boot(seed: u64) -> BootstrapConfig {
    BootstrapConfig::default().with_seed(seed)
}

#[test]
fn aggregation_examples() {
    let r: Vec<f64> = (0..100).map(|i| i as f64).collect();
    assert_eq!(aggregate_returns(&r, 1, AggregationMode::Overlap).unwrap(), r);
    assert_eq!(aggregate_returns(&r, 1, AggregationMode::Nonoverlap).unwrap(), r);
    assert_eq!(aggregate_returns(&r, 25, AggregationMode::Overlap).unwrap().len(), 76);
    assert_eq!(aggregate_returns(&r, 25, AggregationMode::Nonoverlap).unwrap().len(), 4);
    let c = vec![0.01; 50];
    assert!(aggregate_returns(&c, 5, AggregationMode::Nonoverlap).unwrap().iter().all(|&x| (x - 0.05).abs() < 1e-15));
    assert!(matches!(aggregate_returns(&c, 26, AggregationMode::Overlap), Err(Error::InsufficientData(_))));
    assert!(aggregate_returns(&c, 0, AggregationMode::Overlap).is_err());
}

#[test]
fn annualization() {
    assert!((annualize(1.5873e-4, 1.0) - 0.04).abs() < 1e-6);
    assert!((annualize(0.0039683, 25.0) - 0.04).abs() < 1e-6);
    assert!((annualize(deannualize(0.037, 25.0), 25.0) - 0.037).abs() < 1e-17);
}

#[test]
fn quantile_examples() {
    assert_eq!(empirical_quantile(&[3.0, 1.0, 2.0], 0.5).unwrap(), 2.0);
    let z = gaussian(100_000, 1.0, 1);
    assert!((empirical_quantile(&z, 0.975).unwrap() - 1.959_964).abs() < 0.03);
    assert!(empirical_quantile(&z, 0.0).is_err());
    assert!(empirical_quantile(&z, 1.0).is_err());
    assert!(empirical_quantile(&[1.0], 0.5).is_err());
}

#[test]
fn crow_siddiqui_oracles() {
    // normal: 2 x 1.959964 / (2 x 0.674490) - 2.91 = -0.00415
    let z = gaussian(1_000_000, 1.0, 2);
    let k = crow_siddiqui_kurtosis(&z).unwrap();
    assert!(k.abs() <= 0.03);
    assert!((k - -0.004_15).abs() < 0.03);
    // Laplace: (ln 20 / ln 2) - 2.91 = 1.411928
    let l = laplace(1_000_000, 3);
    let kl = crow_siddiqui_kurtosis(&l).unwrap();
    assert!((kl - 1.411_928).abs() < 0.05, "{kl}");
    let shifted: Vec<f64> = l.iter().map(|x| 3.0 * x - 7.0).collect();
    assert!((crow_siddiqui_kurtosis(&shifted).unwrap() - kl).abs() < 1e-12);
    assert!(matches!(crow_siddiqui_kurtosis(&[1.0; 2000]), Err(Error::Degenerate(_))));
}

#[test]
fn hinkley_symmetry_and_invariance() {
    let z = laplace(10_001, 4);
    let mut mirror: Vec<f64> = z.iter().map(|x| x.abs()).collect();
    mirror.extend(z.iter().map(|x| -x.abs()));
    assert_eq!(hinkley_skewness(&mirror, HINKLEY_ALPHA).unwrap(), 0.0);
    mirror.push(0.0);
    assert_eq!(hinkley_skewness(&mirror, HINKLEY_ALPHA).unwrap(), 0.0);

    let skewed: Vec<f64> = z.iter().map(|x| x.exp()).collect();
    let h = hinkley_skewness(&skewed, HINKLEY_ALPHA).unwrap();
    assert!(h > 0.0 && h <= 1.0);
    let neg: Vec<f64> = skewed.iter().map(|x| -x).collect();
    assert!((hinkley_skewness(&neg, HINKLEY_ALPHA).unwrap() + h).abs() < 1e-14);
    let aff: Vec<f64> = skewed.iter().map(|x| 0.5 * x + 2.0).collect();
    assert!((hinkley_skewness(&aff, HINKLEY_ALPHA).unwrap() - h).abs() < 1e-12);
    assert!(hinkley_skewness(&skewed[..50], HINKLEY_ALPHA).is_err());
}

#[test]
fn iid_series_has_zero_riv() {
    let r = gaussian(24_000, 0.0126, 5);
    let d = variance_dynamics(&r, &[1, 5, 25, 125], 1, AggregationMode::Overlap, &boot(6)).unwrap();
    for &h in &[5, 25, 125] {
        assert!(d.riv_covers(h, 0.0).unwrap(), "h={h} riv={} ci={:?}", d.riv[d.index_of(h).unwrap()], d.ci.riv);
    }
    assert_eq!(d.emiv_hat[0], 0.0);
    assert_eq!(d.riv[0], 0.0);
    assert!(d.riv.iter().all(|&x| x < 1.0));
    let rows = d.figure_rows();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.ci_lo <= r.var_annualized && r.var_annualized <= r.ci_hi));
    assert!((rows[0].eiv_annualized - rows[3].eiv_annualized).abs() < 1e-15);
}

#[test]
fn heston_riv_intervals_cover_closed_form() {
    // single-series coverage of the block-25 intervals is roughly 94/91/85 %
    let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
    let hs = [1usize, 5, 25, 125];
    let b = BootstrapConfig { resamples: 250, ..BootstrapConfig::default() };
    let reps = 40;
    let mut hits = [0usize; 3];
    for k in 0..reps {
        let r = simulate_heston_daily(&p, 24_000, 2, 300 + k).unwrap();
        let d = variance_dynamics(&r, &hs, 1, AggregationMode::Overlap, &b.with_seed(k)).unwrap();
        for (j, &h) in hs[1..].iter().enumerate() {
            let target = heston::marginal_variance(&p, Horizon::trading_days(h as f64).unwrap()).riv();
            hits[j] += d.riv_covers(h, target).unwrap() as usize;
        }
    }
    let freq = hits.map(|c| c as f64 / reps as f64);
    assert!(freq[0] >= 0.8 && freq[1] >= 0.75 && freq[2] >= 0.65, "{freq:?}");
}

#[test]
fn windowing_modes_agree() {
    let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
    let r = simulate_heston_daily(&p, 24_000, 4, 31).unwrap();
    let hs = [1, 5, 25, 125];
    let a = variance_dynamics(&r, &hs, 1, AggregationMode::Overlap, &boot(1)).unwrap();
    let b = variance_dynamics(&r, &hs, 1, AggregationMode::Nonoverlap, &boot(1)).unwrap();
    for i in 0..hs.len() {
        assert!((a.var_hat[i] - b.var_hat[i]).abs() <= a.ci.var_hat[i].hypot(b.ci.var_hat[i]));
    }
}

#[test]
fn scale_equivariance_and_anchoring() {
    let r = gaussian(6_000, 0.01, 8);
    let s: Vec<f64> = r.iter().map(|x| 3.0 * x).collect();
    let hs = [1, 10, 50];
    let a = variance_dynamics(&r, &hs, 10, AggregationMode::Overlap, &boot(2)).unwrap();
    let b = variance_dynamics(&s, &hs, 10, AggregationMode::Overlap, &boot(2)).unwrap();
    assert_eq!(a.riv[1], 0.0);
    assert_eq!(a.emiv_hat[1], 0.0);
    for i in 0..3 {
        assert!((b.var_hat[i] - 9.0 * a.var_hat[i]).abs() < 1e-12 * b.var_hat[i]);
        assert!((b.emiv_hat[i] - 9.0 * a.emiv_hat[i]).abs() < 1e-11 * b.var_hat[i]);
        assert!((b.riv[i] - a.riv[i]).abs() < 1e-11);
    }
    assert!(variance_dynamics(&r, &hs, 2, AggregationMode::Overlap, &boot(2)).is_err());
    assert!(matches!(
        variance_dynamics(&r[..1000], &hs, 1, AggregationMode::Overlap, &boot(2)),
        Err(Error::InsufficientData(_))
    ));
}

#[test]
fn bootstrap_is_deterministic_across_threads() {
    let r = gaussian(3_000, 0.01, 9);
    let run = |t| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .unwrap()
            .install(|| variance_dynamics(&r, &[1, 5, 20], 1, AggregationMode::Overlap, &boot(3)).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn variance_estimate_consistency() {
    let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
    let t = Horizon::trading_days(25.0).unwrap();
    let target = heston::marginal_variance(&p, t).total;
    let few = BootstrapConfig { resamples: 2, ..BootstrapConfig::default() };
    let err = |n: usize| -> f64 {
        (0..16)
            .map(|k| {
                let r = simulate_heston_daily(&p, n, 2, 1000 + k).unwrap();
                let d = variance_dynamics(&r, &[1, 25], 1, AggregationMode::Overlap, &few).unwrap();
                (d.var_hat[1] - target).abs()
            })
            .sum::<f64>()
            / 16.0
    };
    let (e1, e2, e3) = (err(6_000), err(24_000), err(96_000));
    assert!(e1 > e2 && e2 > e3, "{e1} {e2} {e3}");
}

#[test]
fn short_horizon_kurtosis_link() {
    let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
    let r = simulate_heston_daily(&p, 200_000, 4, 77).unwrap();
    let m = sample_moments(&r).unwrap();
    let (shape, _) = p.stationary_gamma();
    let target = 3.0 + 3.0 / shape;
    assert!(m.kurtosis.within(target, 3.0), "{:?} vs {target}", m.kurtosis);
}

#[test]
fn size_report_columns() {
    let panel: Vec<ReturnSeries> = (0..3)
        .map(|k| ReturnSeries::synthetic(format!("p{k}"), gaussian(5_000, 0.01 * (k + 1) as f64, 40 + k)).unwrap())
        .collect();
    let rep = size_report(&panel, &SizeReportOptions::default()).unwrap();
    assert_eq!(rep.rows.len(), 3);
    for row in &rep.rows {
        assert!(row.riv.abs() <= 2.0 * row.riv_ci, "{row:?}");
        assert!((row.eiv_annualized - row.var1_annualized).abs() < 1e-15);
        assert!(row.cs_excess_kurtosis.abs() < 0.3);
    }
    assert!(size_report(&[], &SizeReportOptions::default()).is_err());
}

proptest! {
    #[test]
    fn quantiles_monotone(xs in prop::collection::vec(-1e3f64..1e3, 2..200), q1 in 0.001f64..0.999, q2 in 0.001f64..0.999) {
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        prop_assert!(empirical_quantile(&xs, lo).unwrap() <= empirical_quantile(&xs, hi).unwrap());
    }

    #[test]
    fn hinkley_bounded(xs in prop::collection::vec(-1e3f64..1e3, 100..300)) {
        if let Ok(h) = hinkley_skewness(&xs, 0.05) {
            prop_assert!((-1.0..=1.0).contains(&h));
        }
    }

    #[test]
    fn overlap_sums_match_direct(xs in prop::collection::vec(-1.0f64..1.0, 10..100), h in 1usize..5) {
        let agg = aggregate_returns(&xs, h, AggregationMode::Overlap).unwrap();
        for (i, a) in agg.iter().enumerate() {
            let direct: f64 = xs[i..i + h].iter().sum();
            prop_assert!((a - direct).abs() < 1e-12);
        }
    }
}

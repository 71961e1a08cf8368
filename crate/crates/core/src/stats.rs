//! Sample statistics with standard errors, plus a few normal-law helpers.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// Distance to `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.se == 0.0 {
            if self.value == target { 0.0 } else { f64::INFINITY }
        } else {
            (self.value - target) / self.se
        }
    }

    pub fn within(&self, target: f64, n_se: f64) -> bool {
        self.z_score(target).abs() <= n_se
    }
}

/// Mean, variance, skewness and excess kurtosis, optionally with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard_errors: Option<MomentErrors>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentErrors {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Sample moments of a large sample. Standard errors come from a grouped
/// (delete-one-group) jackknife over contiguous groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub n: usize,
    pub mean: Estimate,
    /// Unbiased sample variance.
    pub variance: Estimate,
    pub third_central: Estimate,
    pub fourth_central: Estimate,
    pub skewness: Estimate,
    /// Raw kurtosis m4/m2² (3 for a normal law).
    pub kurtosis: Estimate,
}

impl SampleMoments {
    pub fn to_moment_set(&self) -> MomentSet {
        MomentSet {
            mean: self.mean.value,
            variance: self.variance.value,
            skewness: self.skewness.value,
            excess_kurtosis: self.kurtosis.value - 3.0,
            standard_errors: Some(MomentErrors {
                mean: self.mean.se,
                variance: self.variance.se,
                skewness: self.skewness.se,
                excess_kurtosis: self.kurtosis.se,
            }),
        }
    }
}

const JACKKNIFE_GROUPS: usize = 100;

#[derive(Clone, Copy, Default)]
struct PowerSums {
    n: f64,
    s: [f64; 4],
}

impl PowerSums {
    fn add(&mut self, d: f64) {
        let d2 = d * d;
        self.n += 1.0;
        self.s[0] += d;
        self.s[1] += d2;
        self.s[2] += d2 * d;
        self.s[3] += d2 * d2;
    }

    fn minus(&self, o: &PowerSums) -> PowerSums {
        PowerSums {
            n: self.n - o.n,
            s: [
                self.s[0] - o.s[0],
                self.s[1] - o.s[1],
                self.s[2] - o.s[2],
                self.s[3] - o.s[3],
            ],
        }
    }

    /// (mean offset, unbiased variance, m3, m4, skewness, kurtosis)
    fn stats(&self) -> [f64; 6] {
        let n = self.n;
        let d = self.s[0] / n;
        let r2 = self.s[1] / n;
        let r3 = self.s[2] / n;
        let r4 = self.s[3] / n;
        let c2 = (r2 - d * d).max(0.0);
        let c3 = r3 - 3.0 * d * r2 + 2.0 * d * d * d;
        let c4 = r4 - 4.0 * d * r3 + 6.0 * d * d * r2 - 3.0 * d.powi(4);
        [
            d,
            c2 * n / (n - 1.0),
            c3,
            c4,
            c3 / c2.powf(1.5),
            c4 / (c2 * c2),
        ]
    }
}

pub fn sample_moments(data: &[f64]) -> Result<SampleMoments> {
    let n = data.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "moments need at least 2 observations, got {n}"
        )));
    }
    let pivot = data.iter().sum::<f64>() / n as f64;
    let groups = JACKKNIFE_GROUPS.min(n);
    let mut parts = vec![PowerSums::default(); groups];
    for (i, &x) in data.iter().enumerate() {
        parts[i * groups / n].add(x - pivot);
    }
    let mut total = PowerSums::default();
    for p in &parts {
        total.n += p.n;
        for k in 0..4 {
            total.s[k] += p.s[k];
        }
    }
    let full = total.stats();
    let scale = data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if full[1] <= (1e-14 * scale).powi(2) || full[1] == 0.0 {
        return Err(Error::Degenerate(format!(
            "sample variance is {:e}; skewness and kurtosis are undefined",
            full[1]
        )));
    }
    let leave_out: Vec<[f64; 6]> = parts.iter().map(|p| total.minus(p).stats()).collect();
    let g = groups as f64;
    let se = |k: usize| -> f64 {
        let m = leave_out.iter().map(|s| s[k]).sum::<f64>() / g;
        let ss = leave_out.iter().map(|s| (s[k] - m).powi(2)).sum::<f64>();
        ((g - 1.0) / g * ss).sqrt()
    };
    let est = |k: usize, value: f64| Estimate { value, se: se(k) };
    Ok(SampleMoments {
        n,
        mean: est(0, pivot + full[0]),
        variance: est(1, full[1]),
        third_central: est(2, full[2]),
        fourth_central: est(3, full[3]),
        skewness: est(4, full[4]),
        kurtosis: est(5, full[5]),
    })
}

/// Grouped jackknife of a smooth function of column means.
///
/// `row(i)` yields the `K` per-observation quantities whose means feed `f`;
/// the standard error comes from 100 contiguous leave-one-group-out replicates.
pub fn jackknife_means<const K: usize>(
    n: usize,
    row: impl Fn(usize) -> [f64; K],
    f: impl Fn(&[f64; K]) -> f64,
) -> Result<Estimate> {
    if n < 2 {
        return Err(Error::InsufficientData(format!("jackknife needs at least 2 observations, got {n}")));
    }
    let groups = JACKKNIFE_GROUPS.min(n);
    let mut sums = vec![[0.0; K]; groups];
    let mut counts = vec![0usize; groups];
    for i in 0..n {
        let g = i * groups / n;
        let r = row(i);
        for k in 0..K {
            sums[g][k] += r[k];
        }
        counts[g] += 1;
    }
    let mut total = [0.0; K];
    for s in &sums {
        for k in 0..K {
            total[k] += s[k];
        }
    }
    let value = f(&total.map(|t| t / n as f64));
    let reps: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| {
            let m = (n - c) as f64;
            let mut means = [0.0; K];
            for k in 0..K {
                means[k] = (total[k] - s[k]) / m;
            }
            f(&means)
        })
        .collect();
    let g = groups as f64;
    let mean_rep = reps.iter().sum::<f64>() / g;
    let ss = reps.iter().map(|r| (r - mean_rep).powi(2)).sum::<f64>();
    Ok(Estimate { value, se: ((g - 1.0) / g * ss).sqrt() })
}

/// Mean with the usual standard error.
pub fn mean_estimate(data: &[f64]) -> Result<Estimate> {
    let n = data.len();
    if n < 2 {
        return Err(Error::InsufficientData("need at least 2 observations".into()));
    }
    let m = data.iter().sum::<f64>() / n as f64;
    let v = data.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    Ok(Estimate {
        value: m,
        se: (v / n as f64).sqrt(),
    })
}

/// Unbiased sample variance around the sample mean.
pub fn sample_variance(data: &[f64]) -> f64 {
    let n = data.len() as f64;
    let m = data.iter().sum::<f64>() / n;
    data.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}

pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    (-(z * z) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn std_normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn jackknife_of_a_mean_is_the_classical_se() {
        let mut rng = stream_rng(3, 0);
        let x: Vec<f64> = (0..100).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let jk = jackknife_means(x.len(), |i| [x[i]], |m| m[0]).unwrap();
        let direct = mean_estimate(&x).unwrap();
        assert!((jk.value - direct.value).abs() < 1e-15);
        assert!((jk.se / direct.se - 1.0).abs() < 1e-12);
        assert!(jackknife_means(1, |_| [0.0], |m| m[0]).is_err());
    }

    #[test]
    fn constant_input_is_degenerate() {
        let err = sample_moments(&[2.5; 100]).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn normal_sample_kurtosis_near_three() {
        let mut rng = stream_rng(11, 0);
        let xs: Vec<f64> = (0..200_000).map(|_| rng.sample(StandardNormal)).collect();
        let m = sample_moments(&xs).unwrap();
        assert!(m.kurtosis.within(3.0, 3.0), "{:?}", m.kurtosis);
        assert!(m.skewness.within(0.0, 3.0), "{:?}", m.skewness);
        assert!(m.variance.within(1.0, 3.0), "{:?}", m.variance);
        // analytic SE of kurtosis for a normal sample is sqrt(24/n)
        let expect = (24.0 / 200_000.0f64).sqrt();
        assert!((m.kurtosis.se / expect - 1.0).abs() < 0.3);
    }

    #[test]
    fn reordering_leaves_estimates_unchanged() {
        let mut rng = stream_rng(5, 1);
        let xs: Vec<f64> = (0..5000).map(|_| rng.sample::<f64, _>(StandardNormal).exp()).collect();
        let mut ys = xs.clone();
        ys.reverse();
        let a = sample_moments(&xs).unwrap();
        let b = sample_moments(&ys).unwrap();
        for (u, v) in [
            (a.mean.value, b.mean.value),
            (a.variance.value, b.variance.value),
            (a.skewness.value, b.skewness.value),
            (a.kurtosis.value, b.kurtosis.value),
        ] {
            assert!((u - v).abs() <= 1e-10 * u.abs().max(1.0));
        }
    }

    #[test]
    fn normal_helpers() {
        assert!((std_normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((std_normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-9);
        assert!((normal_pdf(0.0, 0.0, 1.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
    }
}

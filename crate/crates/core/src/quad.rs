//! Adaptive Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are shared with the 7-point Gauss rule.
pub(crate) const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

pub(crate) const GK15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

pub(crate) const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Returns (Kronrod estimate, |Kronrod - Gauss|) on [a, b].
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK15_WEIGHTS[7];
    let mut g = fc * G7_WEIGHTS[3];
    for j in 0..7 {
        let dx = h * GK15_NODES[j];
        let s = f(c - dx) + f(c + dx);
        k += GK15_WEIGHTS[j] * s;
        if j % 2 == 1 {
            g += G7_WEIGHTS[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive integrator: the segment with the largest error estimate
/// is bisected until the summed estimate meets `max(abs_tol, rel_tol*|I|)`.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_segments: 4000,
        }
    }
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Integrator {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if a > b {
            return self.integrate(f, b, a).map(|v| -v);
        }
        let mut heap = BinaryHeap::new();
        // Start from a few panels so narrow features are less likely to be missed.
        let n0 = 4;
        let width = (b - a) / n0 as f64;
        let (mut total, mut err) = (0.0, 0.0);
        for i in 0..n0 {
            let lo = a + width * i as f64;
            let hi = if i + 1 == n0 { b } else { lo + width };
            let (v, e) = gk15(&f, lo, hi);
            total += v;
            err += e;
            heap.push(Segment { a: lo, b: hi, value: v, error: e });
        }
        while err > self.abs_tol.max(self.rel_tol * total.abs()) {
            if heap.len() >= self.max_segments {
                return Err(Error::Quadrature(format!(
                    "error estimate {err:e} after {} segments on [{a}, {b}]",
                    heap.len()
                )));
            }
            let seg = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (seg.a + seg.b);
            if mid <= seg.a || mid >= seg.b {
                // Segment can no longer be split in floating point.
                return Err(Error::Quadrature(format!(
                    "segment [{}, {}] exhausted machine precision",
                    seg.a, seg.b
                )));
            }
            let (v1, e1) = gk15(&f, seg.a, mid);
            let (v2, e2) = gk15(&f, mid, seg.b);
            total += v1 + v2 - seg.value;
            err += e1 + e2 - seg.error;
            heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
            heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
        }
        if !total.is_finite() {
            return Err(Error::Quadrature("non-finite integrand".into()));
        }
        Ok(total)
    }

    /// Integral over [a, ∞) through x = a + u/(1-u).
    pub fn integrate_to_inf<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<f64> {
        self.integrate(
            |u| {
                if u >= 1.0 {
                    return 0.0;
                }
                let w = 1.0 - u;
                let v = f(a + u / w) / (w * w);
                if v.is_finite() { v } else { 0.0 }
            },
            0.0,
            1.0,
        )
    }

    /// Integral over (-∞, b].
    pub fn integrate_from_neg_inf<F: Fn(f64) -> f64>(&self, f: F, b: f64) -> Result<f64> {
        self.integrate_to_inf(|x| f(2.0 * b - x), b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = Integrator::default();
        let v = q.integrate(|x| 3.0 * x * x, 0.0, 2.0).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_tails() {
        let q = Integrator::default();
        let half = q
            .integrate_to_inf(|x| (-0.5 * x * x).exp(), 0.0)
            .unwrap();
        assert!((half - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-11);
        let left = q
            .integrate_from_neg_inf(|x| (-0.5 * x * x).exp(), 0.0)
            .unwrap();
        assert!((left - half).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let q = Integrator::new(1e-12, 1e-10);
        let v = q.integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn reversed_limits() {
        let q = Integrator::default();
        let v = q.integrate(|x| x, 1.0, 0.0).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
    }
}

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

use super::{marginal_mean, marginal_variance, ExponentWalker, HestonParams};
use crate::error::{invalid, Error, Result};
use crate::quad::{G7_WEIGHTS, GK15_NODES, GK15_WEIGHTS};
use crate::units::Horizon;

/// Truncation: stop the frequency integral once `|e^{F(P)}|` is below this.
const TAIL_MAGNITUDE: f64 = 1e-12;
/// Values within this distance below zero are rounding noise and are clipped.
const NEGATIVE_CLIP: f64 = 1e-12;
const MIN_SPAN_SD: f64 = 8.0;
const MAX_REFINEMENTS: usize = 8;

/// Density values on an ordered grid of log-returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub horizon: Horizon,
}

impl DensityCurve {
    fn trapezoid(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (f(x[0], y[0]) + f(x[1], y[1])))
            .sum()
    }

    pub fn integral(&self) -> f64 {
        self.trapezoid(|_, y| y)
    }

    /// Mean and second to fourth central moments by trapezoid quadrature.
    pub fn moments(&self) -> [f64; 4] {
        let mass = self.integral();
        let mean = self.trapezoid(|x, y| x * y) / mass;
        let c = |k: i32| self.trapezoid(|x, y| (x - mean).powi(k) * y) / mass;
        [mean, c(2), c(3), c(4)]
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Largest pointwise gap to another curve on the same grid.
    pub fn sup_distance(&self, other: &DensityCurve) -> Result<f64> {
        if self.grid != other.grid {
            return Err(invalid("density curves are on different grids"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Two-column CSV: `x,density`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,density")?;
        for (x, y) in self.grid.iter().zip(&self.values) {
            writeln!(w, "{x},{y}")?;
        }
        Ok(())
    }
}

/// `n` equally spaced points spanning the mean ± `width_sd` unconditional standard deviations.
pub fn default_grid(p: &HestonParams, t: Horizon, n: usize, width_sd: f64) -> Vec<f64> {
    let c = marginal_mean(p, t);
    let sd = marginal_variance(p, t).total.sqrt();
    let n = n.max(2);
    (0..n)
        .map(|i| c - width_sd * sd + 2.0 * width_sd * sd * i as f64 / (n - 1) as f64)
        .collect()
}

/// Fixed composite Gauss–Kronrod rule on `[0, P]` with the integrand's
/// smooth factor precomputed at every node.
struct FrequencyRule {
    nodes: Vec<f64>,
    smooth: Vec<Complex64>,
    kronrod: Vec<f64>,
    gauss: Vec<f64>,
}

fn build_rule(p: &HestonParams, t: Horizon, shift: f64, cutoff: f64, width: f64) -> Result<FrequencyRule> {
    let panels = (cutoff / width).ceil() as usize;
    let h = cutoff / panels as f64;
    let cap = panels * 15;
    let mut rule = FrequencyRule {
        nodes: Vec::with_capacity(cap),
        smooth: Vec::with_capacity(cap),
        kronrod: Vec::with_capacity(cap),
        gauss: Vec::with_capacity(cap),
    };
    let mut walker = ExponentWalker::new(p, t);
    for k in 0..panels {
        let c = (k as f64 + 0.5) * h;
        let half = 0.5 * h;
        // ascending order: -x_0 .. -x_6, 0, x_6 .. x_0
        for j in 0..15 {
            let (off, wk, wg) = if j < 7 {
                let g = if j % 2 == 1 { G7_WEIGHTS[j / 2] } else { 0.0 };
                (-GK15_NODES[j], GK15_WEIGHTS[j], g)
            } else if j == 7 {
                (0.0, GK15_WEIGHTS[7], G7_WEIGHTS[3])
            } else {
                let i = 14 - j;
                let g = if i % 2 == 1 { G7_WEIGHTS[i / 2] } else { 0.0 };
                (GK15_NODES[i], GK15_WEIGHTS[i], g)
            };
            let px = c + half * off;
            let f = walker.advance(px)?;
            // shift the phase so the remaining oscillation is e^{i p (x - mean)}
            rule.nodes.push(px);
            rule.smooth.push((f + Complex64::new(0.0, px * shift)).exp());
            rule.kronrod.push(wk * half);
            rule.gauss.push(wg * half);
        }
    }
    Ok(rule)
}

/// Marginal density of `X_t` by Fourier inversion,
/// `P_t(x) = (1/pi) ∫_0^∞ Re[exp(i p (x - r t) + F_t(p))] dp`.
///
/// The grid must be ordered and span at least ±8 unconditional standard
/// deviations around the mean.
pub fn marginal_density(p: &HestonParams, t: Horizon, grid: &[f64]) -> Result<DensityCurve> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("density grid must hold at least two strictly increasing points"));
    }
    let mean = marginal_mean(p, t);
    let sd = marginal_variance(p, t).total.sqrt();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    if lo > mean - MIN_SPAN_SD * sd || hi < mean + MIN_SPAN_SD * sd {
        return Err(invalid(format!(
            "density grid [{lo}, {hi}] must span mean ± {MIN_SPAN_SD} sd = [{}, {}]",
            mean - MIN_SPAN_SD * sd,
            mean + MIN_SPAN_SD * sd
        )));
    }
    // e^{F} is the transform of X - rt, whose mean is mean - rt.
    let shift = mean - p.r() * t.t();
    let cutoff = truncation_point(p, t, sd)?;
    let max_dev = grid.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    let mut width = (2.0 * PI / max_dev).min(1.0 / sd);

    for _ in 0..MAX_REFINEMENTS {
        let rule = build_rule(p, t, shift, cutoff, width)?;
        let evaluated: Vec<(f64, f64)> = grid
            .par_iter()
            .map(|&x| {
                let d = x - mean;
                let (mut k, mut g) = (0.0, 0.0);
                for i in 0..rule.nodes.len() {
                    let (s, c) = (rule.nodes[i] * d).sin_cos();
                    let z = rule.smooth[i];
                    let re = c * z.re - s * z.im;
                    k += rule.kronrod[i] * re;
                    g += rule.gauss[i] * re;
                }
                (k / PI, ((k - g) / PI).abs())
            })
            .collect();
        let peak = evaluated.iter().map(|v| v.0).fold(0.0, f64::max);
        let worst = evaluated.iter().map(|v| v.1).fold(0.0, f64::max);
        if worst <= 1e-9 * peak {
            let mut values = Vec::with_capacity(grid.len());
            for (&x, &(v, _)) in grid.iter().zip(&evaluated) {
                if v < -NEGATIVE_CLIP {
                    return Err(Error::NegativeDensity { x, value: v });
                }
                values.push(v.max(0.0));
            }
            return Ok(DensityCurve {
                grid: grid.to_vec(),
                values,
                horizon: t,
            });
        }
        width *= 0.5;
    }
    Err(Error::Quadrature(format!(
        "Fourier inversion did not reach tolerance after {MAX_REFINEMENTS} panel refinements"
    )))
}

/// Smallest power-of-two multiple of `1/sd` beyond which `|e^{F}|` and the
/// neglected tail mass are negligible.
fn truncation_point(p: &HestonParams, t: Horizon, sd: f64) -> Result<f64> {
    let mut walker = ExponentWalker::new(p, t);
    let mut px = 1.0 / sd;
    let step_to = |walker: &mut ExponentWalker, target: f64| -> Result<Complex64> {
        // walk in modest increments so the branch tracker sees a smooth path
        let start = walker.position();
        let n = ((target - start) * sd).ceil().max(1.0) as usize;
        let mut f = Complex64::new(0.0, 0.0);
        for i in 1..=n {
            f = walker.advance(start + (target - start) * i as f64 / n as f64)?;
        }
        Ok(f)
    };
    for _ in 0..60 {
        let f = step_to(&mut walker, px)?;
        let mag = f.re.exp();
        if mag < TAIL_MAGNITUDE && mag * px * sd < 0.1 * TAIL_MAGNITUDE {
            return Ok(px);
        }
        px *= 2.0;
    }
    Err(Error::Quadrature("characteristic function does not decay".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heston::{fourth_central_moment, third_central_moment};

    fn yr(t: f64) -> Horizon {
        Horizon::years(t).unwrap()
    }

    #[test]
    fn normalised_and_moment_consistent() {
        let p = HestonParams::new(0.03, 2.0, 0.04, 0.3, -0.7).unwrap();
        let t = yr(25.0 / 252.0);
        let grid = default_grid(&p, t, 1601, 12.0);
        let d = marginal_density(&p, t, &grid).unwrap();
        assert!((d.integral() - 1.0).abs() < 1e-6);
        let m = d.moments();
        let var = marginal_variance(&p, t).total;
        assert!((m[0] / marginal_mean(&p, t) - 1.0).abs() < 1e-4);
        assert!((m[1] / var - 1.0).abs() < 1e-4);
        assert!((m[2] / third_central_moment(&p, t) - 1.0).abs() < 1e-3);
        assert!((m[3] / fourth_central_moment(&p, t) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_narrow_or_unordered_grid() {
        let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
        let t = yr(1.0);
        let narrow = default_grid(&p, t, 101, 4.0);
        assert!(marginal_density(&p, t, &narrow).is_err());
        let mut g = default_grid(&p, t, 101, 12.0);
        g.swap(3, 4);
        assert!(marginal_density(&p, t, &g).is_err());
    }

    #[test]
    fn csv_layout() {
        let d = DensityCurve {
            grid: vec![0.0, 1.0],
            values: vec![0.5, 0.25],
            horizon: yr(1.0),
        };
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,density\n0,0.5\n1,0.25\n");
    }
}

//! Uniform-grid sampling, `L_p` norms and certified sup-norm estimates.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::TrigPoly;
use crate::error::{Error, Result};

/// Sampling grid: `points` uniform nodes on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    /// Golden-section iterations per sup-norm candidate.
    pub refinement_depth: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 4096,
            refinement_depth: 40,
        }
    }
}

impl GridSpec {
    pub fn new(points: usize, refinement_depth: usize) -> Self {
        GridSpec {
            points,
            refinement_depth,
        }
    }

    /// Smallest admissible power of two for a support bound.
    pub fn required_points(support_bound: u64) -> usize {
        (4 * (support_bound as usize + 1)).next_power_of_two()
    }

    /// This grid, enlarged if needed to satisfy the oversampling rule for `f`.
    pub fn fitted(&self, f: &TrigPoly) -> GridSpec {
        GridSpec {
            points: self.points.max(Self::required_points(f.support_bound())),
            refinement_depth: self.refinement_depth,
        }
    }

    pub fn check(&self, f: &TrigPoly) -> Result<()> {
        let support = f.support_bound();
        let required = Self::required_points(support);
        if !self.points.is_power_of_two() || self.points < required {
            return Err(Error::Grid {
                points: self.points,
                support,
                required,
            });
        }
        Ok(())
    }

    pub fn node(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.points as f64
    }
}

/// Values `f(2πj/N)` for `j = 0..N` (complex, in case `f` is not real).
pub fn samples(f: &TrigPoly, grid: &GridSpec) -> Result<Vec<Complex64>> {
    grid.check(f)?;
    let n = grid.points;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in f.iter() {
        buf[k.rem_euclid(n as i64) as usize] += c;
    }
    // unnormalised inverse transform: Σ_k c_k e^{+2πijk/N}
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    Ok(buf)
}

/// Compensated (Neumaier) summation.
fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `(∫_0^{2π} |f|^p)^{1/p}` by the rectangle rule, exact for `p = 2`.
pub fn lp_norm(f: &TrigPoly, p: f64, grid: &GridSpec) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("lp_norm needs p in [1, ∞), got {p}")));
    }
    let values = samples(f, grid)?;
    let h = 2.0 * PI / grid.points as f64;
    let total = if p == 2.0 {
        neumaier(values.iter().map(|z| z.norm_sqr()))
    } else if p == 1.0 {
        neumaier(values.iter().map(|z| z.norm()))
    } else {
        neumaier(values.iter().map(|z| z.norm().powf(p)))
    };
    Ok((h * total).powf(1.0 / p))
}

/// Sup-norm estimate: `value` is attained (a lower bound), `value + gap` is an
/// upper bound by Bernstein's inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: f64,
    pub gap: f64,
    /// Point where `value` is attained.
    pub argmax: f64,
}

impl SupNorm {
    pub fn upper(&self) -> f64 {
        self.value + self.gap
    }
}

fn golden_max(h: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = h(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

const REFINED_CANDIDATES: usize = 8;

/// `max |f|` on the grid, refined around the largest local maxima.
pub fn sup_norm(f: &TrigPoly, grid: &GridSpec) -> Result<SupNorm> {
    let values = samples(f, grid)?;
    let n = values.len();
    let mags: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    let (mut best_j, mut grid_max) = (0usize, mags[0]);
    for (j, &m) in mags.iter().enumerate() {
        if m > grid_max {
            grid_max = m;
            best_j = j;
        }
    }
    let mut value = grid_max;
    let mut argmax = grid.node(best_j);
    if grid.refinement_depth > 0 && !f.is_empty() {
        let mut peaks: Vec<usize> = (0..n)
            .filter(|&j| mags[j] >= mags[(j + n - 1) % n] && mags[j] >= mags[(j + 1) % n])
            .collect();
        peaks.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
        let step = 2.0 * PI / n as f64;
        let eval = f.evaluator();
        for &j in peaks.iter().take(REFINED_CANDIDATES) {
            let t0 = grid.node(j);
            let (t, m) = golden_max(
                |t| eval(t).norm(),
                t0 - step,
                t0 + step,
                grid.refinement_depth,
            );
            if m > value {
                value = m;
                argmax = t;
            }
        }
    }
    let bernstein = grid_max + PI / n as f64 * f.derivative_mass();
    Ok(SupNorm {
        value,
        gap: (bernstein - value).max(0.0),
        argmax,
    })
}

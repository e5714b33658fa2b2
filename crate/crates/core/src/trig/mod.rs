//! Finite trigonometric polynomials stored by complex Fourier coefficients
//! `f̂(k) = (1/2π)∫ f(t) e^{-ikt} dt`, with norms on `[0, 2π)` taken without
//! normalisation: `‖f‖_p = (∫_0^{2π} |f|^p)^{1/p}`.

mod grid;
mod ops;

pub use grid::{lp_norm, samples, sup_norm, GridSpec, SupNorm};
pub use ops::{
    convolve_kernel, partial_sum_order, partial_sum_set, phase, psi_beta_derivative,
    psi_beta_integral, psi_kernel_poly, remove_set, vallee_poussin, KernelPoly,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Sparse collection `k ↦ f̂(k)`; absent keys are zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "RawPoly", into = "RawPoly")]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawPoly {
    coeffs: Vec<(i64, f64, f64)>,
}

impl From<RawPoly> for TrigPoly {
    fn from(raw: RawPoly) -> Self {
        TrigPoly::from_coeffs(
            raw.coeffs
                .into_iter()
                .map(|(k, re, im)| (k, Complex64::new(re, im))),
        )
    }
}

impl From<TrigPoly> for RawPoly {
    fn from(p: TrigPoly) -> Self {
        RawPoly {
            coeffs: p.coeffs.iter().map(|(&k, c)| (k, c.re, c.im)).collect(),
        }
    }
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a polynomial from `(k, f̂(k))` pairs; repeated keys accumulate,
    /// exact zeros are dropped.
    pub fn from_coeffs(items: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in items {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c: &mut Complex64| *c != Complex64::new(0.0, 0.0));
        TrigPoly { coeffs }
    }

    /// The constant function `c`.
    pub fn constant(c: f64) -> Self {
        Self::from_coeffs([(0, Complex64::new(c, 0.0))])
    }

    /// `a·cos(kt)` for `k >= 1`.
    pub fn cosine(k: i64, a: f64) -> Self {
        let half = Complex64::new(a / 2.0, 0.0);
        Self::from_coeffs([(k, half), (-k, half)])
    }

    /// `a·sin(kt)` for `k >= 1`.
    pub fn sine(k: i64, a: f64) -> Self {
        let c = Complex64::new(0.0, -a / 2.0);
        Self::from_coeffs([(k, c), (-k, c.conj())])
    }

    /// Real polynomial from `k ↦ c` for `k >= 0`, mirrored as `c(-k) = conj c(k)`.
    pub fn from_positive(items: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        Self::from_coeffs(items.into_iter().flat_map(|(k, c)| {
            if k == 0 {
                vec![(0, Complex64::new(c.re, 0.0))]
            } else {
                vec![(k, c), (-k, c.conj())]
            }
        }))
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs
            .get(&k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    /// Stored frequencies in increasing order.
    pub fn support(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|k|` stored (0 for the zero polynomial).
    pub fn support_bound(&self) -> u64 {
        self.coeffs
            .keys()
            .map(|k| k.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// `Σ |f̂(k)|`.
    pub fn l1_coeff_mass(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `Σ |k|·|f̂(k)|`, the Bernstein constant for `|f'|`.
    pub fn derivative_mass(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| k.unsigned_abs() as f64 * c.norm())
            .sum()
    }

    /// `Σ |f̂(k)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Largest conjugate-symmetry defect `|f̂(-k) - conj f̂(k)|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(&k, &c)| (self.coeff(-k) - c.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Whether the polynomial is real-valued up to `tol·Σ|f̂|`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.symmetry_defect() <= tol * self.l1_coeff_mass().max(f64::MIN_POSITIVE)
    }

    pub fn map(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        Self::from_coeffs(self.iter().map(|(k, c)| (k, f(k, c))))
    }

    pub fn filter(&self, keep: impl Fn(i64) -> bool) -> Self {
        TrigPoly {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&k, _)| keep(k))
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|_, c| c * a)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_coeffs(self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_coeffs(self.iter().chain(other.iter().map(|(k, c)| (k, -c))))
    }

    /// `Σ f̂(k) e^{ikt}` as a complex number.
    ///
    /// Runs of consecutive frequencies advance the exponential by one rotation
    /// per step and resynchronise every 64 steps to bound rounding drift.
    pub fn evaluate_complex(&self, t: f64) -> Complex64 {
        evaluate_terms(self.coeffs.iter().map(|(&k, &c)| (k, c)), t)
    }

    /// A reusable evaluator over a flattened copy of the coefficients, for
    /// callers that evaluate the same polynomial many times.
    pub fn evaluator(&self) -> impl Fn(f64) -> Complex64 {
        let terms: Vec<(i64, Complex64)> = self.iter().collect();
        move |t| evaluate_terms(terms.iter().copied(), t)
    }

    /// Real value at `t`; fails if the imaginary residue exceeds `1e-12·Σ|f̂|`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let z = self.evaluate_complex(t);
        let bound = 1e-12 * self.l1_coeff_mass();
        if z.im.abs() > bound {
            return Err(Error::Symmetry {
                residue: z.im.abs(),
                bound,
            });
        }
        Ok(z.re)
    }
}

fn evaluate_terms(terms: impl Iterator<Item = (i64, Complex64)>, t: f64) -> Complex64 {
    const RESYNC: u32 = 64;
    let step = Complex64::from_polar(1.0, t);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut prev: Option<(i64, Complex64)> = None;
    let mut run = 0u32;
    for (k, c) in terms {
        let e = match prev {
            Some((kp, ep)) if kp + 1 == k && run < RESYNC => {
                run += 1;
                ep * step
            }
            _ => {
                run = 0;
                Complex64::from_polar(1.0, k as f64 * t)
            }
        };
        acc += c * e;
        prev = Some((k, e));
    }
    acc
}

/// A finite set of signed integer frequencies.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencySet {
    members: BTreeSet<i64>,
}

impl FrequencySet {
    pub fn new(items: impl IntoIterator<Item = i64>) -> Self {
        FrequencySet {
            members: items.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `{±k : lo <= k <= hi}`.
    pub fn symmetric_band(lo: i64, hi: i64) -> Self {
        Self::new((lo..=hi).flat_map(|k| [k, -k]))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, k: i64) -> bool {
        self.members.contains(&k)
    }

    pub fn insert(&mut self, k: i64) -> bool {
        self.members.insert(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.members.iter().copied()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.iter().chain(other.iter()))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.members.is_disjoint(&other.members)
    }
}

impl FromIterator<i64> for FrequencySet {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        Self::new(iter)
    }
}

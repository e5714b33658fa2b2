//! Best orthogonal m-term approximation `e⊥_m(f)_s`, Fourier-sum errors and
//! the analytic dual lower bounds.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::bounds::{self, Theorem};
use crate::error::{Error, Result};
use crate::psi::{
    alpha_inf, conjugate_exponent, tail_sum, Decay, PsiFunction, SearchGrid, WeightedPsi,
};
use crate::trig::{
    lp_norm, partial_sum_order, phase, remove_set, sup_norm, FrequencySet, GridSpec, TrigPoly,
};

/// Error metric `L_s`, `1 <= s <= ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    Lp(f64),
    Sup,
}

impl Metric {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_infinite() && s > 0.0 {
            Ok(Metric::Sup)
        } else if s >= 1.0 {
            Ok(Metric::Lp(s))
        } else {
            Err(Error::Domain(format!(
                "metric exponent s = {s} must be >= 1"
            )))
        }
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            Metric::Lp(s) => s,
            Metric::Sup => f64::INFINITY,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Metric::Sup),
            other => Metric::new(
                other
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("metric '{other}': {e}")))?,
            ),
        }
    }
}

/// A norm value known to lie in `[lo, hi]` (`lo == hi` when computed exactly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub lo: f64,
    pub hi: f64,
}

impl Measured {
    pub fn exact(v: f64) -> Self {
        Measured { lo: v, hi: v }
    }
}

/// `‖f‖_s` as an interval.
pub fn norm_interval(f: &TrigPoly, metric: Metric, grid: &GridSpec) -> Result<Measured> {
    match metric {
        Metric::Lp(2.0) => Ok(Measured::exact((2.0 * PI * f.energy()).sqrt())),
        Metric::Lp(s) => Ok(Measured::exact(lp_norm(f, s, &grid.fitted(f))?)),
        Metric::Sup => {
            let r = sup_norm(f, &grid.fitted(f))?;
            Ok(Measured {
                lo: r.value,
                hi: r.upper(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Exhaustive,
    Greedy,
    SymmetricPairs,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "greedy" => Ok(Strategy::Greedy),
            "symmetricpairs" | "pairs" => Ok(Strategy::SymmetricPairs),
            _ => Err(Error::Parse(format!("unknown strategy '{s}'"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Greedy => "greedy",
            Strategy::SymmetricPairs => "symmetric-pairs",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub chosen: FrequencySet,
    /// Certified lower end of `‖f - S_γ f‖_s` for the chosen set.
    pub error: f64,
    /// Upper end (differs from `error` only for `s = ∞`).
    pub error_upper: f64,
    pub strategy: Strategy,
    pub certified: bool,
}

/// Largest number of subsets the exhaustive search will visit.
pub const EXHAUSTIVE_LIMIT: u128 = 2_000_000;
/// Relative tolerance under which two errors count as a tie.
const TIE_TOL: f64 = 1e-12;

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of subsets of size `<= m` of an `n`-set.
fn subsets_up_to(n: usize, m: usize) -> u128 {
    (0..=m.min(n)).fold(0u128, |acc, j| {
        acc.saturating_add(binomial(n as u128, j as u128))
    })
}

/// Pads a chosen subset of the support to exactly `m` members with unused
/// integers in the order `0, 1, -1, 2, -2, ...`.
fn pad(chosen: &[i64], f: &TrigPoly, m: usize) -> FrequencySet {
    let mut set = FrequencySet::new(chosen.iter().copied());
    let mut j = 0i64;
    while set.len() < m {
        for k in if j == 0 { vec![0] } else { vec![j, -j] } {
            if set.len() < m
                && f.coeff(k) == num_complex::Complex64::new(0.0, 0.0)
                && !set.contains(k)
            {
                set.insert(k);
            }
        }
        j += 1;
    }
    set
}

fn residual_norm(
    f: &TrigPoly,
    removed: &[i64],
    metric: Metric,
    grid: &GridSpec,
) -> Result<Measured> {
    let gamma = FrequencySet::new(removed.iter().copied());
    norm_interval(&remove_set(f, &gamma), metric, grid)
}

/// `true` if `a` is strictly better than `b` beyond the tie tolerance.
fn strictly_better(a: f64, b: f64) -> bool {
    a < b - TIE_TOL * b.abs().max(f64::MIN_POSITIVE)
}

fn lex_less(a: &FrequencySet, b: &FrequencySet) -> bool {
    a.iter().cmp(b.iter()) == Ordering::Less
}

struct Best {
    chosen: FrequencySet,
    value: Measured,
}

fn consider(best: &mut Option<Best>, removed: &[i64], value: Measured, f: &TrigPoly, m: usize) {
    let replace = match best {
        None => true,
        Some(b) => {
            strictly_better(value.lo, b.value.lo)
                || (!strictly_better(b.value.lo, value.lo) && {
                    let cand = pad(removed, f, m);
                    lex_less(&cand, &b.chosen)
                })
        }
    };
    if replace {
        *best = Some(Best {
            chosen: pad(removed, f, m),
            value,
        });
    }
}

fn exhaustive(f: &TrigPoly, m: usize, metric: Metric, grid: &GridSpec) -> Result<Best> {
    let support = f.support();
    let count = subsets_up_to(support.len(), m);
    if count > EXHAUSTIVE_LIMIT {
        return Err(Error::Combinatorial {
            subsets: count,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let energies: Vec<f64> = support.iter().map(|&k| f.coeff(k).norm_sqr()).collect();
    let total_energy = f.energy();
    let grid = grid.fitted(f);
    let mut best: Option<Best> = None;
    let mut stack: Vec<usize> = Vec::with_capacity(m);
    // depth-first, lexicographic over index tuples
    fn visit(
        start: usize,
        stack: &mut Vec<usize>,
        m: usize,
        ctx: &mut dyn FnMut(&[usize]) -> Result<()>,
        n: usize,
    ) -> Result<()> {
        ctx(stack)?;
        if stack.len() == m {
            return Ok(());
        }
        for i in start..n {
            stack.push(i);
            visit(i + 1, stack, m, ctx, n)?;
            stack.pop();
        }
        Ok(())
    }
    let mut eval = |idx: &[usize]| -> Result<()> {
        let removed: Vec<i64> = idx.iter().map(|&i| support[i]).collect();
        let value = match metric {
            Metric::Lp(2.0) => {
                let kept = total_energy - idx.iter().map(|&i| energies[i]).sum::<f64>();
                Measured::exact((2.0 * PI * kept.max(0.0)).sqrt())
            }
            _ => residual_norm(f, &removed, metric, &grid)?,
        };
        consider(&mut best, &removed, value, f, m);
        Ok(())
    };
    visit(0, &mut stack, m, &mut eval, support.len())?;
    Ok(best.expect("the empty set is always visited"))
}

/// Greedy removal order: largest `|f̂(k)|`, then smaller `|k|`, then negative first.
fn greedy_order(f: &TrigPoly) -> Vec<i64> {
    let mut ks = f.support();
    ks.sort_by(|&a, &b| {
        f.coeff(b)
            .norm()
            .total_cmp(&f.coeff(a).norm())
            .then(a.abs().cmp(&b.abs()))
            .then(a.cmp(&b))
    });
    ks
}

/// Removal sets for symmetric pairs: `⌊j/2⌋` pairs of largest `|f̂(k)| + |f̂(-k)|`,
/// plus `0` for odd `j`, topped up greedily.
fn symmetric_set(f: &TrigPoly, j: usize) -> Vec<i64> {
    let mut pairs: Vec<i64> = f
        .support()
        .into_iter()
        .filter(|&k| k != 0)
        .map(i64::abs)
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let amp = |k: i64| f.coeff(k).norm() + f.coeff(-k).norm();
    pairs.sort_by(|&a, &b| amp(b).total_cmp(&amp(a)).then(a.cmp(&b)));
    let mut chosen: Vec<i64> = Vec::with_capacity(j);
    for &k in pairs.iter().take(j / 2) {
        for s in [k, -k] {
            if f.coeff(s) != num_complex::Complex64::new(0.0, 0.0) {
                chosen.push(s);
            }
        }
    }
    if j % 2 == 1 && f.coeff(0) != num_complex::Complex64::new(0.0, 0.0) {
        chosen.push(0);
    }
    for k in greedy_order(f) {
        if chosen.len() >= j {
            break;
        }
        if !chosen.contains(&k) {
            chosen.push(k);
        }
    }
    chosen.truncate(j);
    chosen
}

/// Best over the nested candidate sets `sets(0..=m)`; keeps the result
/// monotone in `m`.
fn best_of_candidates(
    f: &TrigPoly,
    m: usize,
    metric: Metric,
    grid: &GridSpec,
    sets: impl Fn(usize) -> Vec<i64>,
) -> Result<Best> {
    let grid = grid.fitted(f);
    let mut best: Option<Best> = None;
    for j in 0..=m.min(f.len()) {
        let removed = sets(j);
        let value = residual_norm(f, &removed, metric, &grid)?;
        consider(&mut best, &removed, value, f, m);
    }
    Ok(best.expect("at least the empty candidate"))
}

/// `e⊥_m(f)_s` (Exhaustive) or an upper estimate of it (Greedy, SymmetricPairs).
pub fn best_orth_approx(
    f: &TrigPoly,
    m: usize,
    metric: Metric,
    strategy: Strategy,
    grid: &GridSpec,
) -> Result<ApproxResult> {
    let best = match strategy {
        Strategy::Exhaustive => exhaustive(f, m, metric, grid)?,
        Strategy::Greedy => {
            let order = greedy_order(f);
            best_of_candidates(f, m, metric, grid, |j| order[..j].to_vec())?
        }
        Strategy::SymmetricPairs => {
            best_of_candidates(f, m, metric, grid, |j| symmetric_set(f, j))?
        }
    };
    Ok(ApproxResult {
        chosen: best.chosen,
        error: best.value.lo,
        error_upper: best.value.hi,
        strategy,
        certified: strategy == Strategy::Exhaustive,
    })
}

/// `‖f - S_{n-1}(f)‖_s`.
pub fn fourier_sum_error(
    f: &TrigPoly,
    n: u64,
    metric: Metric,
    grid: &GridSpec,
) -> Result<Measured> {
    norm_interval(&f.sub(&partial_sum_order(f, n)), metric, grid)
}

/// Hölder-duality witness: `inf_γ |∫(f - S_γ f) g| / ‖g‖_{s'}` over `|γ| = remove`,
/// bounded below through the real parts of `2π f̂(k) ĝ(-k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualWitness {
    pub value: f64,
    /// `min_γ |Σ_{k∉γ} Re z_k|` before normalisation.
    pub functional: f64,
    pub dual_norm: f64,
    /// Whether all `Re z_k` shared one sign (otherwise the witness is 0).
    pub one_signed: bool,
}

pub fn dual_witness(f: &TrigPoly, g: &TrigPoly, dual_norm: f64, remove: usize) -> DualWitness {
    let z = f.iter().map(|(k, c)| 2.0 * PI * (c * g.coeff(-k)).re);
    witness_from_terms(z, dual_norm, remove)
}

/// Point-evaluation witness for the uniform metric: `‖h‖_∞ >= |h(t₀)|`, so
/// `e⊥_m(f)_∞ >= min_γ |Σ_{k∉γ} f̂(k) e^{ikt₀}|`, bounded below through real parts.
pub fn evaluation_witness(f: &TrigPoly, t0: f64, remove: usize) -> DualWitness {
    let z = f
        .iter()
        .map(|(k, c)| (c * num_complex::Complex64::from_polar(1.0, k as f64 * t0)).re);
    witness_from_terms(z, 1.0, remove)
}

fn witness_from_terms(z: impl Iterator<Item = f64>, dual_norm: f64, remove: usize) -> DualWitness {
    let mut z: Vec<f64> = z.filter(|v| *v != 0.0).collect();
    let one_signed = z.iter().all(|&v| v > 0.0) || z.iter().all(|&v| v < 0.0);
    if !one_signed || !(dual_norm > 0.0) {
        return DualWitness {
            value: 0.0,
            functional: 0.0,
            dual_norm,
            one_signed,
        };
    }
    z.iter_mut().for_each(|v| *v = v.abs());
    z.sort_by(|a, b| b.total_cmp(a));
    // smallest terms first for accuracy
    let functional: f64 = z.iter().skip(remove).rev().sum();
    DualWitness {
        value: functional / dual_norm,
        functional,
        dual_norm,
        one_signed,
    }
}

/// `cos(βπ/2)`, exactly zero at odd integers.
pub fn cos_beta(beta: f64) -> f64 {
    phase(beta, 1).re
}

/// The analytic lower bound extracted from the theorem's dual functional at a
/// finite `l` (`None` for the limit `l → ∞`).
pub fn dual_lower_bound(
    theorem: Theorem,
    psi: &PsiFunction,
    beta: f64,
    p_or_s: f64,
    n: u64,
    l: Option<u64>,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if l == Some(0) {
        return Err(Error::Domain("l must be >= 1".into()));
    }
    let inv_2l = l.map_or(0.0, |l| 0.5 / l as f64);
    let cfg = SearchGrid::default();
    let value = match theorem {
        Theorem::T1 => {
            bounds::check_hypotheses(theorem, psi, beta, p_or_s)?;
            let p = p_or_s;
            let pc = conjugate_exponent(p);
            let a = alpha_inf(&WeightedPsi::new(*psi, p)?, n as f64, &cfg);
            let t = tail_sum(psi, pc, n)?.lower();
            (a / (pc + a)).powf(1.0 / p) * (1.0 - inv_2l - pc / a) * t.powf(1.0 / pc)
                / (3.0 * bounds::xi(p)?)
        }
        Theorem::T2 => {
            bounds::check_hypotheses(theorem, psi, beta, p_or_s)?;
            let s = p_or_s;
            let sc = conjugate_exponent(s);
            let a = alpha_inf(&WeightedPsi::new(*psi, sc)?, n as f64, &cfg);
            let t = tail_sum(psi, s, n)?.lower();
            (a / (s + a)).powf(1.0 / sc) * (1.0 - inv_2l - s / a) * t.powf(1.0 / s)
                / (4.0 * bounds::xi(sc)?)
        }
        Theorem::T3 => {
            bounds::check_hypotheses(theorem, psi, beta, 1.0)?;
            let a1 = alpha_inf(&WeightedPsi::new(*psi, 1.0)?, 1.0, &cfg);
            let sum = tail_sum(psi, 1.0, n)?.lower();
            cos_beta(beta).abs() * (1.0 - 1.0 / (a1 * n as f64) - inv_2l) * sum / (12.0 * PI)
        }
        Theorem::T4 => {
            bounds::check_hypotheses(theorem, psi, beta, 1.0)?;
            psi.value(2.0 * n as f64) * n as f64 / (30.0 * PI)
        }
        Theorem::T5 => {
            let t = if cos_beta(beta) == 0.0 {
                Theorem::T4
            } else {
                Theorem::T3
            };
            return dual_lower_bound(t, psi, beta, p_or_s, n, l);
        }
    };
    Ok(value.max(0.0))
}

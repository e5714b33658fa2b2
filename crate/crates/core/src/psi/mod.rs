//! Decay functions `ψ` on `[1, ∞)`, their α-characteristic, class membership,
//! tail integrals and certified tail sums.

mod quad;
mod tail;

pub use quad::{integrate_adaptive, Quadrature};
pub use tail::{
    cutoff_a, cutoff_d, phi_s, phi_s_inverse, psi_integral, psi_integral_inverse, tail_integral,
    tail_integral_inverse, tail_sum, TailSum, TailWeight,
};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Exponents closer than this to a critical value are treated as equal to it.
pub(crate) const EXPONENT_SNAP: f64 = 1e-12;

/// Conjugate exponent `p' = p/(p-1)`; `1 -> ∞`, `∞ -> 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// The parametric families supported by the library.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum PsiFamily {
    /// `t^{-r}`.
    Power { r: f64 },
    /// `t^{-1/p} ln^{-γ}(t + K)`.
    LogPower { p: f64, gamma: f64, k: f64 },
    /// `t^{-1/p} ln^{-γ}(t + K₁) (ln ln(t + K₂))^{-δ}`.
    LogLogPower {
        p: f64,
        gamma: f64,
        delta: f64,
        k1: f64,
        k2: f64,
    },
}

impl PsiFamily {
    fn name(&self) -> &'static str {
        match self {
            PsiFamily::Power { .. } => "power",
            PsiFamily::LogPower { .. } => "log_power",
            PsiFamily::LogLogPower { .. } => "loglog_power",
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::Admissibility {
                family: self.name(),
                reason,
            })
        };
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            PsiFamily::Power { r } => {
                if !finite_pos(r) {
                    return fail(format!("r = {r} must be > 0"));
                }
            }
            PsiFamily::LogPower { p, gamma, k } => {
                if !(p.is_finite() && p >= 1.0) {
                    return fail(format!("p = {p} must lie in [1, ∞)"));
                }
                if p == 1.0 {
                    if !(gamma > 1.0) {
                        return fail(format!("γ = {gamma} must be > 1 when p = 1"));
                    }
                    if !finite_pos(k) {
                        return fail(format!("K = {k} must be > 0 when p = 1"));
                    }
                } else {
                    let pc = conjugate_exponent(p);
                    if !(gamma > 1.0 / pc) {
                        return fail(format!("γ = {gamma} must exceed 1/p' = {}", 1.0 / pc));
                    }
                    let k_min = (gamma * pc).exp() - 1.0;
                    if !(k.is_finite() && k >= k_min * (1.0 - 1e-14)) {
                        return fail(format!("K = {k} must be >= e^(γp') - 1 = {k_min}"));
                    }
                }
            }
            PsiFamily::LogLogPower {
                p,
                gamma,
                delta,
                k1,
                k2,
            } => {
                if !(p.is_finite() && p >= 1.0) {
                    return fail(format!("p = {p} must lie in [1, ∞)"));
                }
                if p == 1.0 {
                    if !(gamma >= 1.0) {
                        return fail(format!("γ = {gamma} must be >= 1 when p = 1"));
                    }
                    if !(delta > 1.0) {
                        return fail(format!("δ = {delta} must be > 1 when p = 1"));
                    }
                    if !finite_pos(k1) {
                        return fail(format!("K₁ = {k1} must be > 0 when p = 1"));
                    }
                    if !(k2.is_finite() && k2 > std::f64::consts::E - 1.0) {
                        return fail(format!("K₂ = {k2} must exceed e - 1 when p = 1"));
                    }
                } else {
                    let pc = conjugate_exponent(p);
                    if !(gamma >= 1.0 / pc * (1.0 - 1e-14)) {
                        return fail(format!("γ = {gamma} must be >= 1/p' = {}", 1.0 / pc));
                    }
                    if !(delta > 1.0 / pc) {
                        return fail(format!("δ = {delta} must exceed 1/p' = {}", 1.0 / pc));
                    }
                    let growth = ((gamma + delta) * pc).max(std::f64::consts::E).exp();
                    let k1_min = growth - 1.0;
                    let k2_min = k1 * growth - 1.0;
                    if !(k1.is_finite() && k1 >= k1_min * (1.0 - 1e-14)) {
                        return fail(format!("K₁ = {k1} must be >= {k1_min}"));
                    }
                    if !(k2.is_finite() && k2 >= k2_min * (1.0 - 1e-14) && k2 >= k1) {
                        return fail(format!(
                            "K₂ = {k2} must be >= max(K₁, K₁·e^M - 1 = {k2_min})"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A validated member of one of the supported families, times a positive scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPsi", into = "RawPsi")]
pub struct PsiFunction {
    family: PsiFamily,
    scale: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPsi {
    #[serde(flatten)]
    family: PsiFamily,
    #[serde(default = "unit_scale", skip_serializing_if = "is_unit_scale")]
    scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

fn is_unit_scale(s: &f64) -> bool {
    *s == 1.0
}

impl TryFrom<RawPsi> for PsiFunction {
    type Error = Error;
    fn try_from(raw: RawPsi) -> Result<Self> {
        PsiFunction::new(raw.family)?.scaled(raw.scale)
    }
}

impl From<PsiFunction> for RawPsi {
    fn from(psi: PsiFunction) -> Self {
        RawPsi {
            family: psi.family,
            scale: psi.scale,
        }
    }
}

impl fmt::Display for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            PsiFamily::Power { r } => write!(f, "power:{r}")?,
            PsiFamily::LogPower { p, gamma, k } => write!(f, "log-power:{p},{gamma},{k}")?,
            PsiFamily::LogLogPower {
                p,
                gamma,
                delta,
                k1,
                k2,
            } => write!(f, "loglog-power:{p},{gamma},{delta},{k1},{k2}")?,
        }
        if self.scale != 1.0 {
            write!(f, "*{}", self.scale)?;
        }
        Ok(())
    }
}

/// Parses the [`Display`](fmt::Display) form, e.g. `power:0.75`,
/// `log-power:2,1,6.39*0.5`, plus the shorthands `log-power-min:p,γ` and
/// `loglog-power-min:p,γ,δ` for the smallest admissible shifts.
impl std::str::FromStr for PsiFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, scale) = match s.split_once('*') {
            Some((b, c)) => (b, Some(c)),
            None => (s, None),
        };
        let (name, args) = body
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `family:args`, got `{s}`")))?;
        let args: Vec<f64> = args
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad number `{a}` in `{s}`: {e}")))
            })
            .collect::<Result<_>>()?;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "`{name}` takes {n} argument(s), got {}",
                    args.len()
                )))
            }
        };
        let psi = match name.trim() {
            "power" => arity(1).and_then(|_| Self::power(args[0])),
            "log-power" => arity(3).and_then(|_| Self::log_power(args[0], args[1], args[2])),
            "log-power-min" => arity(2).and_then(|_| Self::log_power_min_shift(args[0], args[1])),
            "loglog-power" => arity(5)
                .and_then(|_| Self::loglog_power(args[0], args[1], args[2], args[3], args[4])),
            "loglog-power-min" => {
                arity(3).and_then(|_| Self::loglog_power_min_shift(args[0], args[1], args[2]))
            }
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }?;
        match scale {
            Some(c) => {
                let c: f64 = c
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad scale `{c}`: {e}")))?;
                psi.scaled(c)
            }
            None => Ok(psi),
        }
    }
}

impl PsiFunction {
    pub fn new(family: PsiFamily) -> Result<Self> {
        family.validate()?;
        Ok(PsiFunction { family, scale: 1.0 })
    }

    pub fn power(r: f64) -> Result<Self> {
        Self::new(PsiFamily::Power { r })
    }

    pub fn log_power(p: f64, gamma: f64, k: f64) -> Result<Self> {
        Self::new(PsiFamily::LogPower { p, gamma, k })
    }

    /// Log-power member with the smallest admissible shift `K = e^{γp'} - 1`.
    pub fn log_power_min_shift(p: f64, gamma: f64) -> Result<Self> {
        if p <= 1.0 {
            return Err(Error::Admissibility {
                family: "log_power",
                reason: "minimal shift is only defined for p > 1".into(),
            });
        }
        let k = (gamma * conjugate_exponent(p)).exp() - 1.0;
        Self::log_power(p, gamma, k)
    }

    pub fn loglog_power(p: f64, gamma: f64, delta: f64, k1: f64, k2: f64) -> Result<Self> {
        Self::new(PsiFamily::LogLogPower {
            p,
            gamma,
            delta,
            k1,
            k2,
        })
    }

    /// Log-log-power member with the smallest admissible shifts.
    pub fn loglog_power_min_shift(p: f64, gamma: f64, delta: f64) -> Result<Self> {
        if p <= 1.0 {
            return Err(Error::Admissibility {
                family: "loglog_power",
                reason: "minimal shift is only defined for p > 1".into(),
            });
        }
        let growth = ((gamma + delta) * conjugate_exponent(p))
            .max(std::f64::consts::E)
            .exp();
        let k1 = growth - 1.0;
        let k2 = (k1 * growth - 1.0).max(k1);
        Self::loglog_power(p, gamma, delta, k1, k2)
    }

    /// `c·ψ` for `c > 0`.
    pub fn scaled(self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("scale {c} must be finite and > 0")));
        }
        Ok(PsiFunction {
            family: self.family,
            scale: self.scale * c,
        })
    }

    pub fn family(&self) -> PsiFamily {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Exponents `(a, γ, δ)` with `ψ(t) ~ t^{-a} ln^{-γ} t (ln ln t)^{-δ}`.
    pub fn shape(&self) -> (f64, f64, f64) {
        match self.family {
            PsiFamily::Power { r } => (r, 0.0, 0.0),
            PsiFamily::LogPower { p, gamma, .. } => (1.0 / p, gamma, 0.0),
            PsiFamily::LogLogPower {
                p, gamma, delta, ..
            } => (1.0 / p, gamma, delta),
        }
    }

    pub fn is_power(&self) -> bool {
        matches!(self.family, PsiFamily::Power { .. })
    }

    /// `ln ψ(e^u)` without forming `e^u`, valid for `u >= 0`.
    pub fn ln_value_at_log(&self, u: f64) -> f64 {
        let shifted_ln = |k: f64| u + (k * (-u).exp()).ln_1p();
        let base = self.scale.ln();
        match self.family {
            PsiFamily::Power { r } => base - r * u,
            PsiFamily::LogPower { p, gamma, k } => base - u / p - gamma * shifted_ln(k).ln(),
            PsiFamily::LogLogPower {
                p,
                gamma,
                delta,
                k1,
                k2,
            } => base - u / p - gamma * shifted_ln(k1).ln() - delta * shifted_ln(k2).ln().ln(),
        }
    }
}

/// How `α(f; t)` behaves as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaLimit {
    Finite(f64),
    Infinite,
}

/// A positive function on `[1, ∞)` with an analytic one-sided derivative.
pub trait Decay {
    fn value(&self, t: f64) -> f64;

    /// Logarithmic derivative `t f'(t) / f(t)`, in closed form.
    fn elasticity(&self, t: f64) -> f64;

    fn derivative(&self, t: f64) -> f64 {
        self.value(t) * self.elasticity(t) / t
    }

    /// Limit of the elasticity as `t → ∞`.
    fn elasticity_limit(&self) -> f64;

    /// Whether `f(t) → 0`, given the elasticity limit is not positive.
    fn tends_to_zero(&self) -> bool;

    fn alpha_limit(&self) -> AlphaLimit {
        let e = self.elasticity_limit();
        if e.abs() < EXPONENT_SNAP {
            AlphaLimit::Infinite
        } else {
            AlphaLimit::Finite(1.0 / e.abs())
        }
    }
}

impl Decay for PsiFunction {
    fn value(&self, t: f64) -> f64 {
        let c = self.scale;
        match self.family {
            PsiFamily::Power { r } => c * t.powf(-r),
            PsiFamily::LogPower { p, gamma, k } => c * t.powf(-1.0 / p) * (t + k).ln().powf(-gamma),
            PsiFamily::LogLogPower {
                p,
                gamma,
                delta,
                k1,
                k2,
            } => {
                c * t.powf(-1.0 / p) * (t + k1).ln().powf(-gamma) * (t + k2).ln().ln().powf(-delta)
            }
        }
    }

    fn elasticity(&self, t: f64) -> f64 {
        match self.family {
            PsiFamily::Power { r } => -r,
            PsiFamily::LogPower { p, gamma, k } => -1.0 / p - gamma * t / ((t + k) * (t + k).ln()),
            PsiFamily::LogLogPower {
                p,
                gamma,
                delta,
                k1,
                k2,
            } => {
                let l2 = (t + k2).ln();
                -1.0 / p
                    - gamma * t / ((t + k1) * (t + k1).ln())
                    - delta * t / ((t + k2) * l2 * l2.ln())
            }
        }
    }

    fn elasticity_limit(&self) -> f64 {
        -self.shape().0
    }

    fn tends_to_zero(&self) -> bool {
        true
    }
}

/// `g_q(t) = ψ(t) t^{1/q}` for `q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPsi {
    pub base: PsiFunction,
    pub q: f64,
}

impl WeightedPsi {
    pub fn new(base: PsiFunction, q: f64) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(Error::Domain(format!(
                "weight exponent q = {q} must be >= 1"
            )));
        }
        Ok(WeightedPsi { base, q })
    }

    fn inv_q(&self) -> f64 {
        if self.q.is_infinite() {
            0.0
        } else {
            1.0 / self.q
        }
    }

    fn snapped_tail_exponent(&self) -> f64 {
        let e = self.inv_q() - self.base.shape().0;
        if e.abs() < EXPONENT_SNAP {
            0.0
        } else {
            e
        }
    }
}

impl Decay for WeightedPsi {
    fn value(&self, t: f64) -> f64 {
        self.base.value(t) * t.powf(self.inv_q())
    }

    fn elasticity(&self, t: f64) -> f64 {
        match self.base.family {
            // keep the cancellation between -1/p and 1/q exact
            PsiFamily::Power { .. } => self.snapped_tail_exponent(),
            PsiFamily::LogPower { gamma, k, .. } => {
                self.snapped_tail_exponent() - gamma * t / ((t + k) * (t + k).ln())
            }
            PsiFamily::LogLogPower {
                gamma,
                delta,
                k1,
                k2,
                ..
            } => {
                let l2 = (t + k2).ln();
                self.snapped_tail_exponent()
                    - gamma * t / ((t + k1) * (t + k1).ln())
                    - delta * t / ((t + k2) * l2 * l2.ln())
            }
        }
    }

    fn elasticity_limit(&self) -> f64 {
        self.snapped_tail_exponent()
    }

    fn tends_to_zero(&self) -> bool {
        let e = self.snapped_tail_exponent();
        let (_, gamma, delta) = self.base.shape();
        e < 0.0 || (e == 0.0 && (gamma > 0.0 || delta > 0.0))
    }
}

/// `α(f; t) = f(t) / (t |f'(t)|)`.
pub fn alpha<D: Decay + ?Sized>(f: &D, t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("α(ψ; t) needs t >= 1, got {t}")));
    }
    let e = f.elasticity(t);
    if e == 0.0 || !e.is_finite() {
        return Err(Error::Domain(format!("derivative vanishes at t = {t}")));
    }
    Ok(1.0 / e.abs())
}

/// Log-spaced search grid used for infima and suprema over `t >= n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub points: usize,
    pub t_max: f64,
    /// Golden-section iterations around the grid extremum.
    pub refine_iters: usize,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            points: 4096,
            t_max: 1e9,
            refine_iters: 80,
        }
    }
}

impl SearchGrid {
    fn nodes(&self, start: f64) -> Vec<f64> {
        let end = self.t_max.max(start * 10.0);
        let count = self.points.max(2);
        let (l0, l1) = (start.ln(), end.ln());
        (0..count)
            .map(|i| {
                if i == 0 {
                    start
                } else {
                    (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp()
                }
            })
            .collect()
    }
}

fn alpha_or_inf<D: Decay + ?Sized>(f: &D, t: f64) -> f64 {
    let e = f.elasticity(t);
    if e == 0.0 {
        f64::INFINITY
    } else {
        1.0 / e.abs()
    }
}

/// Golden-section search for an extremum of `h` on `[a, b]`; `sign = 1` minimises.
fn golden(h: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize, sign: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (sign * h(c), sign * h(d));
    let mut best = (sign * h(a)).min(sign * h(b)).min(fc).min(fd);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sign * h(c);
            best = best.min(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sign * h(d);
            best = best.min(fd);
        }
        if (b - a) <= 1e-14 * b {
            break;
        }
    }
    sign * best
}

fn extremum<D: Decay + ?Sized>(f: &D, n: f64, cfg: &SearchGrid, sign: f64) -> f64 {
    let nodes = cfg.nodes(n.max(1.0));
    let vals: Vec<f64> = nodes.iter().map(|&t| alpha_or_inf(f, t)).collect();
    let mut idx = 0;
    for (i, v) in vals.iter().enumerate() {
        if sign * v < sign * vals[idx] {
            idx = i;
        }
    }
    let mut best = vals[idx];
    if cfg.refine_iters > 0 && best.is_finite() {
        let lo = nodes[idx.saturating_sub(1)];
        let hi = nodes[(idx + 1).min(nodes.len() - 1)];
        if hi > lo {
            let refined = golden(|t| alpha_or_inf(f, t), lo, hi, cfg.refine_iters, sign);
            if sign * refined < sign * best {
                best = refined;
            }
        }
    }
    match f.alpha_limit() {
        AlphaLimit::Finite(v) => {
            if sign * v < sign * best {
                best = v;
            }
        }
        AlphaLimit::Infinite => {
            if sign < 0.0 {
                best = f64::INFINITY;
            }
        }
    }
    best
}

/// `inf_{t >= n} α(f; t)`.
pub fn alpha_inf<D: Decay + ?Sized>(f: &D, n: f64, cfg: &SearchGrid) -> f64 {
    extremum(f, n, cfg, 1.0)
}

/// `sup_{t >= n} α(f; t)`, `+∞` when the characteristic is unbounded.
pub fn alpha_sup<D: Decay + ?Sized>(f: &D, n: f64, cfg: &SearchGrid) -> f64 {
    extremum(f, n, cfg, -1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    /// α bounded below and above.
    MC,
    /// α bounded below.
    M0,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub verdict: Membership,
    /// `inf_{t >= 1} α`.
    pub lower_margin: f64,
    /// `sup_{t >= 1} α` (may be `+∞`, serialised as `null`).
    pub upper_margin: f64,
    pub search_range: (f64, f64),
    pub grid_size: usize,
    /// Positive, decreasing, convex and vanishing at infinity on the grid.
    pub admissible_shape: bool,
}

impl ClassificationResult {
    pub fn in_m0(&self) -> bool {
        matches!(self.verdict, Membership::M0 | Membership::MC)
    }
}

/// Numerical shape check: positivity, strict decrease, convexity, decay to zero.
pub fn check_shape<D: Decay + ?Sized>(f: &D, cfg: &SearchGrid) -> bool {
    if !(f.elasticity_limit() <= 0.0) || !f.tends_to_zero() {
        return false;
    }
    let nodes = cfg.nodes(1.0);
    let mut prev: Option<(f64, f64)> = None;
    let mut prev_slope: Option<f64> = None;
    for &t in &nodes {
        let v = f.value(t);
        if !(v > 0.0) || !(f.elasticity(t) < 0.0) {
            return false;
        }
        if let Some((t0, v0)) = prev {
            let slope = (v - v0) / (t - t0);
            if let Some(s0) = prev_slope {
                // second divided difference, relative to the local curvature scale
                let dd2 = (slope - s0) / (t - t0);
                if dd2 < -1e-9 * v / (t * t) {
                    return false;
                }
            }
            prev_slope = Some(slope);
        }
        prev = Some((t, v));
    }
    true
}

pub fn classify<D: Decay + ?Sized>(f: &D, cfg: &SearchGrid) -> ClassificationResult {
    let shape = check_shape(f, cfg);
    let lower = alpha_inf(f, 1.0, cfg);
    let upper = alpha_sup(f, 1.0, cfg);
    let verdict = if !shape || !(lower > 0.0) {
        Membership::Neither
    } else if upper.is_finite() {
        Membership::MC
    } else {
        Membership::M0
    };
    ClassificationResult {
        verdict,
        lower_margin: lower,
        upper_margin: upper,
        search_range: (1.0, cfg.t_max.max(10.0)),
        grid_size: cfg.points,
        admissible_shape: shape,
    }
}

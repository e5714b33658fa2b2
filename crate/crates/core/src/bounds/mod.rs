//! Explicit constants and two-sided bounds for `e⊥_{2n}` of the classes
//! `L^ψ_{β,p}`, their numerical sandwich verification, order tables, lemma
//! checks and the reporting layer used by the CLI.

pub mod lemmas;
pub mod report;
pub mod sandwich;
pub mod suite;
pub mod tables;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::approx::cos_beta;
use crate::error::{Error, Result};
use crate::psi::{
    alpha_inf, check_shape, conjugate_exponent, tail_sum, Decay, PsiFunction, SearchGrid, TailSum,
    WeightedPsi,
};

pub use lemmas::{lemma1_check, lemma2_check, tail_cutoff_check, LemmaCheck};
pub use report::{BoundsReport, Budgets, Params, Verdict};
pub use sandwich::{sandwich_check, SandwichConfig};
pub use suite::{run_suite, Criterion, CriterionOutcome, SuiteReport};
pub use tables::{order_table, parse_n_list, Corollary, OrderRow, OrderTable, TableConfig};

/// Which of the five two-sided estimates is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// `L^ψ_{β,p}` in the uniform metric.
    T1,
    /// `L^ψ_{β,1}` in `L_s`.
    T2,
    /// `L^ψ_{β,1}` in the uniform metric, `cos(βπ/2) ≠ 0`.
    T3,
    /// `L^ψ_{β,1}` in the uniform metric, `cos(βπ/2) = 0`.
    T4,
    /// The order dichotomy combining T3 and T4.
    T5,
}

impl Theorem {
    /// T5 resolved to T3 or T4 by the sign pattern of `cos(βπ/2)`.
    pub fn resolve(self, beta: f64) -> Theorem {
        match self {
            Theorem::T5 if cos_beta(beta) == 0.0 => Theorem::T4,
            Theorem::T5 => Theorem::T3,
            t => t,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "T1" => Ok(Theorem::T1),
            "T2" => Ok(Theorem::T2),
            "T3" => Ok(Theorem::T3),
            "T4" => Ok(Theorem::T4),
            "T5" => Ok(Theorem::T5),
            _ => Err(Error::Parse(format!(
                "unknown theorem '{s}' (expected T1..T5)"
            ))),
        }
    }
}

/// `ξ(s) = max{4(π/(s-1))^{1/s}, 14(8π)^{1/s}·s}`.
pub fn xi(s: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::Domain(format!("ξ(s) needs 1 < s < ∞, got {s}")));
    }
    let first = 4.0 * (PI / (s - 1.0)).powf(1.0 / s);
    let second = 14.0 * (8.0 * PI).powf(1.0 / s) * s;
    Ok(first.max(second))
}

/// `K⁽¹⁾_{ψ,p}`, `K⁽²⁾_{ψ,p}` and the `α̲₁(g_p)` they were built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub k1: f64,
    pub k2: f64,
    pub alpha1: f64,
}

/// Slack for the non-strict `α̲₁(g) >= 1` reading used in the `L_1`-class cases.
const ALPHA_EDGE: f64 = 1e-12;

fn m0_alpha(g: &WeightedPsi, label: &str) -> Result<f64> {
    let cfg = SearchGrid::default();
    let a = alpha_inf(g, 1.0, &cfg);
    if !check_shape(g, &cfg) || !(a > 0.0) {
        return Err(Error::Hypothesis(format!(
            "{label} ∉ 𝔐₀ (admissible shape: {}, inf α = {a})",
            check_shape(g, &cfg)
        )));
    }
    Ok(a)
}

fn require_convergent(psi: &PsiFunction, s: f64, label: &str) -> Result<()> {
    match tail_sum(psi, s, 1) {
        Ok(_) => Ok(()),
        Err(Error::Divergence(msg)) => Err(Error::Hypothesis(format!("{label} diverges: {msg}"))),
        Err(e) => Err(e),
    }
}

/// `K⁽¹⁾`, `K⁽²⁾` for `g_p ∈ 𝔐₀` with `α̲₁(g_p) > p'`.
pub fn constants_k(psi: &PsiFunction, p: f64) -> Result<Constants> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("constants need 1 < p < ∞, got {p}")));
    }
    let pc = conjugate_exponent(p);
    let a = m0_alpha(&WeightedPsi::new(*psi, p)?, "g_p")?;
    if !(a > pc) {
        return Err(Error::Hypothesis(format!(
            "α̲₁(g_p) = {a} must exceed p' = {pc}"
        )));
    }
    let k1 = (a / (pc + a)).powf(1.0 / p) * (1.0 - pc / a) / (3.0 * xi(p)?);
    let k2 = xi(pc)? * ((pc + a) / a).powf(1.0 / pc) / PI;
    Ok(Constants { k1, k2, alpha1: a })
}

/// Outcome of a successful hypothesis check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    /// `α̲₁` of the relevant auxiliary function (`g_p`, `g_{s'}` or `ψ(t)t`).
    pub alpha1: f64,
    pub notes: Vec<String>,
}

/// Verifies the hypotheses of `theorem`; the error names the failed inequality.
pub fn check_hypotheses(
    theorem: Theorem,
    psi: &PsiFunction,
    beta: f64,
    p_or_s: f64,
) -> Result<Hypotheses> {
    if !beta.is_finite() {
        return Err(Error::Domain(format!("β = {beta} must be finite")));
    }
    match theorem {
        Theorem::T1 | Theorem::T2 => {
            let e = p_or_s;
            if !(e > 1.0 && e.is_finite()) {
                return Err(Error::Hypothesis(format!(
                    "exponent {e} must lie in (1, ∞)"
                )));
            }
            let ec = conjugate_exponent(e);
            // T1: Σψ^{p'}k^{p'-2}, g_p, α̲₁ > p'.  T2: Σψ^s k^{s-2}, g_{s'}, α̲₁ > s.
            let (series, g_index, bound, label) = match theorem {
                Theorem::T1 => (ec, e, ec, "g_p"),
                _ => (e, ec, e, "g_{s'}"),
            };
            require_convergent(psi, series, "Σ ψ^q(k) k^{q-2}")?;
            let a = m0_alpha(&WeightedPsi::new(*psi, g_index)?, label)?;
            if !(a > bound) {
                return Err(Error::Hypothesis(format!(
                    "α̲₁({label}) = {a} must exceed {bound}"
                )));
            }
            Ok(Hypotheses {
                alpha1: a,
                notes: Vec::new(),
            })
        }
        Theorem::T3 | Theorem::T4 => {
            require_convergent(psi, 1.0, "Σ ψ(k)")?;
            let a = m0_alpha(&WeightedPsi::new(*psi, 1.0)?, "g(t) = ψ(t)t")?;
            let mut notes = Vec::new();
            if !(a > 1.0) {
                if a >= 1.0 - ALPHA_EDGE {
                    notes.push(format!(
                        "α̲₁(g) = {a} sits on the boundary 1: the analytic lower bound degenerates to 0"
                    ));
                } else {
                    return Err(Error::Hypothesis(format!("α̲₁(g) = {a} must exceed 1")));
                }
            }
            let c = cos_beta(beta);
            match theorem {
                Theorem::T3 if c == 0.0 => {
                    return Err(Error::Hypothesis(format!(
                        "T3 needs cos(βπ/2) ≠ 0, β = {beta}"
                    )))
                }
                Theorem::T4 if c != 0.0 => {
                    return Err(Error::Hypothesis(format!(
                        "T4 needs cos(βπ/2) = 0, got {c} at β = {beta}"
                    )))
                }
                _ => {}
            }
            Ok(Hypotheses { alpha1: a, notes })
        }
        Theorem::T5 => check_hypotheses(theorem.resolve(beta), psi, beta, p_or_s),
    }
}

/// Two-sided bound for `e⊥_{2n}` of the class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremBounds {
    pub theorem: Theorem,
    pub lower: f64,
    pub upper: f64,
    /// The tail sum entering both sides.
    pub tail: TailSum,
    pub hypotheses: Hypotheses,
}

/// Lower and upper bound of the theorem; lower uses the lower end of the
/// certified tail bracket and upper its upper end.
pub fn theorem_bounds(
    theorem: Theorem,
    psi: &PsiFunction,
    beta: f64,
    p_or_s: f64,
    n: u64,
) -> Result<TheoremBounds> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let theorem = theorem.resolve(beta);
    let hypotheses = check_hypotheses(theorem, psi, beta, p_or_s)?;
    let (lower, upper, tail) = match theorem {
        Theorem::T1 => {
            let p = p_or_s;
            let pc = conjugate_exponent(p);
            let c = constants_k(psi, p)?;
            let t = tail_sum(psi, pc, n)?;
            (
                c.k1 * t.lower().powf(1.0 / pc),
                c.k2 * t.upper().powf(1.0 / pc),
                t,
            )
        }
        Theorem::T2 => {
            let s = p_or_s;
            let c = constants_k(psi, conjugate_exponent(s))?;
            let t = tail_sum(psi, s, n)?;
            (
                4.0 / 3.0 * c.k1 * t.lower().powf(1.0 / s),
                c.k2 * t.upper().powf(1.0 / s),
                t,
            )
        }
        Theorem::T3 => {
            let t = tail_sum(psi, 1.0, n)?;
            let factor = (1.0 - 1.0 / hypotheses.alpha1).max(0.0);
            (
                cos_beta(beta).abs() * factor * t.lower() / (12.0 * PI),
                t.upper() / PI,
                t,
            )
        }
        Theorem::T4 => {
            let t = tail_sum(psi, 1.0, n)?;
            let factor = (1.0 - 1.0 / hypotheses.alpha1).max(0.0);
            let core = psi.value(n as f64) * n as f64;
            (factor * core / (60.0 * PI), (1.0 + 2.0 / PI) * core, t)
        }
        Theorem::T5 => unreachable!("resolved above"),
    };
    Ok(TheoremBounds {
        theorem,
        lower,
        upper,
        tail,
        hypotheses,
    })
}

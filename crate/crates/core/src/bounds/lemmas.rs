//! Checks of the auxiliary inequalities relating `ψ(n)` to its tail sums and
//! of the cutoff property of `A_s(l;n)`.
//!
//! Every comparison is made with the side that could make it fail pushed to
//! its unfavourable end: tail sums enter through the matching end of their
//! certified bracket, and the grid-searched `α̲_n` (which can only overshoot
//! the true infimum) appears where overshooting tightens the check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psi::{
    alpha_inf, alpha_sup, check_shape, conjugate_exponent, cutoff_a, phi_s, tail_sum, Decay,
    PsiFunction, SearchGrid, WeightedPsi,
};

/// Relative slack granted to every lemma comparison.
pub const LEMMA_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub name: String,
    pub psi: PsiFunction,
    pub s: f64,
    pub n: u64,
    /// The middle quantity (`ψ^s(n)n^{s-1}`, `ψ(n)n`, or a tail).
    pub value: f64,
    pub upper: f64,
    /// Two-sided lower estimate, present for `𝔐_C` functions.
    pub lower: Option<f64>,
    pub holds: bool,
}

fn m0_margins(g: &WeightedPsi, n: u64) -> Result<(f64, f64)> {
    let cfg = SearchGrid::default();
    let lo = alpha_inf(g, n as f64, &cfg);
    if !check_shape(g, &cfg) || !(lo > 0.0) {
        return Err(Error::Hypothesis(format!(
            "auxiliary function not in 𝔐₀ (inf α = {lo})"
        )));
    }
    Ok((lo, alpha_sup(g, n as f64, &cfg)))
}

fn two_sided(
    name: &str,
    psi: &PsiFunction,
    s: f64,
    n: u64,
    value: f64,
    g: &WeightedPsi,
) -> Result<LemmaCheck> {
    let (a_lo, a_hi) = m0_margins(g, n)?;
    let t = tail_sum(psi, s, n)?;
    let upper = s / a_lo * t.lower();
    let nf = n as f64;
    let lower = a_hi
        .is_finite()
        .then(|| s / a_hi * (nf * a_lo / (s + nf * a_lo)) * t.upper());
    let holds = value <= upper * (1.0 + LEMMA_SLACK)
        && lower.is_none_or(|lo| lo <= value * (1.0 + LEMMA_SLACK));
    Ok(LemmaCheck {
        name: name.into(),
        psi: *psi,
        s,
        n,
        value,
        upper,
        lower,
        holds,
    })
}

/// `ψ^s(n) n^{s-1} <= (s/α̲_n(g_{s'})) Σ_{k>=n} ψ^s(k) k^{s-2}`, plus the lower
/// estimate when `g_{s'} ∈ 𝔐_C`.
pub fn lemma1_check(psi: &PsiFunction, s: f64, n: u64) -> Result<LemmaCheck> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::Domain(format!("lemma needs 1 < s < ∞, got {s}")));
    }
    let g = WeightedPsi::new(*psi, conjugate_exponent(s))?;
    let nf = n as f64;
    let value = psi.value(nf).powf(s) * nf.powf(s - 1.0);
    two_sided("psi^s(n) n^(s-1) vs tail", psi, s, n, value, &g)
}

/// `ψ(n) n <= (1/α̲_n(g)) Σ_{k>=n} ψ(k)` with `g = ψ(t)t`, plus the lower
/// estimate when `g ∈ 𝔐_C`.
pub fn lemma2_check(psi: &PsiFunction, n: u64) -> Result<LemmaCheck> {
    let g = WeightedPsi::new(*psi, 1.0)?;
    let nf = n as f64;
    two_sided("psi(n) n vs tail", psi, 1.0, n, psi.value(nf) * nf, &g)
}

/// `Σ_{k>A} ψ^s(k)k^{s-2} <= Φ_s(A) < Φ_s(n)/(2l) <= (1/(2l)) Σ_{k>=n} ψ^s(k)k^{s-2}`
/// with `A = A_s(l;n)`.
pub fn tail_cutoff_check(psi: &PsiFunction, s: f64, l: u64, n: u64) -> Result<LemmaCheck> {
    let a = cutoff_a(psi, s, l, n)?;
    let beyond = tail_sum(psi, s, a + 1)?.upper();
    let phi_a = phi_s(psi, s, a as f64)?;
    let phi_n = phi_s(psi, s, n as f64)?;
    let bound = tail_sum(psi, s, n)?.lower() / (2 * l) as f64;
    let holds = beyond <= phi_a * (1.0 + LEMMA_SLACK)
        && phi_a < phi_n / (2 * l) as f64
        && beyond <= bound * (1.0 + LEMMA_SLACK);
    Ok(LemmaCheck {
        name: format!("tail beyond A_s(l={l};n)"),
        psi: *psi,
        s,
        n,
        value: beyond,
        upper: bound,
        lower: None,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_lemma_values() {
        // ψ = t^{-2}, g = t^{-1}, α ≡ 1: ψ(n)n = 1/n <= Σ_{k>=n} k^{-2}
        let psi = PsiFunction::power(2.0).unwrap();
        let c = lemma2_check(&psi, 3).unwrap();
        assert!(c.holds);
        assert!((c.value - 1.0 / 3.0).abs() < 1e-15);
        assert!(c.lower.is_some());
    }

    #[test]
    fn cutoff_property() {
        let psi = PsiFunction::power(0.75).unwrap();
        for l in [1, 2, 4] {
            assert!(tail_cutoff_check(&psi, 2.0, l, 4).unwrap().holds);
        }
    }

    #[test]
    fn log_family_has_no_lower_estimate() {
        let psi = PsiFunction::log_power_min_shift(2.0, 1.0).unwrap();
        let c = lemma1_check(&psi, 2.0, 5).unwrap();
        assert!(c.holds);
        assert!(c.lower.is_none());
    }
}

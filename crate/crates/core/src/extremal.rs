//! Explicit members of the classes `L^ψ_{β,p}` whose best approximations
//! realise the lower bounds, and a numerical membership check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bounds::xi;
use crate::error::{Error, Result};
use crate::psi::{
    alpha_inf, check_shape, conjugate_exponent, tail_sum, Decay, PsiFunction, SearchGrid, TailSum,
    TailWeight, WeightedPsi,
};
use crate::trig::{lp_norm, phase, psi_beta_derivative, sup_norm, GridSpec, TrigPoly};

/// The triple `(ψ, β, p)` naming the class `L^ψ_{β,p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub psi: PsiFunction,
    pub beta: f64,
    /// `p ∈ [1, ∞]`; `f64::INFINITY` for the sup-norm ball.
    pub p: f64,
}

impl ClassSpec {
    pub fn new(psi: PsiFunction, beta: f64, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::Domain(format!(
                "class exponent p = {p} must be >= 1"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::Domain(format!("β = {beta} must be finite")));
        }
        Ok(ClassSpec { psi, beta, p })
    }

    pub fn p_conjugate(&self) -> f64 {
        conjugate_exponent(self.p)
    }
}

/// How far the infinite series of `f*_p` is kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Truncation {
    /// Keep `n <= k <= N`.
    Fixed(u64),
    /// Smallest power of two whose dropped tail is `<= rel_tol·T_n`; fails
    /// with a truncation error if that needs more than `max_len` terms.
    Auto { rel_tol: f64, max_len: u64 },
    /// Keep at most `N` frequencies and report the dropped mass.
    Capped(u64),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Auto {
            rel_tol: 1e-6,
            max_len: 1 << 20,
        }
    }
}

/// `f*_p` together with the quantities it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalFp {
    pub poly: TrigPoly,
    pub lambda: f64,
    /// `T_n = Σ_{k >= n} ψ^{p'}(k) k^{p'-2}`.
    pub tail: TailSum,
    pub alpha_n: f64,
    pub n_trunc: u64,
    /// Certified upper bound on `Σ_{k > N} ψ^{p'}(k) k^{p'-2}`.
    pub dropped_tail: f64,
    /// Upper bound on the sup-norm of the discarded part of `f*_p`.
    pub dropped_sup: f64,
}

fn m0_margin(g: &WeightedPsi, n: u64, what: &str) -> Result<f64> {
    let cfg = SearchGrid::default();
    let a = alpha_inf(g, n as f64, &cfg);
    if !check_shape(g, &cfg) || !(a > 0.0) {
        return Err(Error::Admissibility {
            family: "weighted",
            reason: format!("{what} is not in the class M0 (inf α = {a})"),
        });
    }
    Ok(a)
}

/// `λ(ψ; p; n) = (1/ξ(p))·(α̲_n(g_p)/(p' + α̲_n(g_p)))^{1/p}`.
pub fn lambda(psi: &PsiFunction, p: f64, n: u64) -> Result<f64> {
    let pc = conjugate_exponent(p);
    let g = WeightedPsi::new(*psi, p)?;
    let a = m0_margin(&g, n, "g_p")?;
    Ok((a / (pc + a)).powf(1.0 / p) / xi(p)?)
}

/// `f*_p(t) = λ T_n^{-1/p} Σ_{k >= n} ψ^{p'}(k) k^{p'-2} cos kt`, truncated.
pub fn extremal_fp(
    psi: &PsiFunction,
    p: f64,
    n: u64,
    truncation: Truncation,
) -> Result<ExtremalFp> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("f*_p needs 1 < p < ∞, got {p}")));
    }
    if n == 0 {
        return Err(Error::Domain("f*_p needs n >= 1".into()));
    }
    let pc = conjugate_exponent(p);
    let g = WeightedPsi::new(*psi, p)?;
    let alpha_n = m0_margin(&g, n, "g_p")?;
    let lambda = (alpha_n / (pc + alpha_n)).powf(1.0 / p) / xi(p)?;
    let tail = tail_sum(psi, pc, n)?;
    let dropped = |n_trunc: u64| -> Result<f64> { Ok(tail_sum(psi, pc, n_trunc + 1)?.upper()) };
    let (n_trunc, dropped_tail) = match truncation {
        Truncation::Fixed(len) | Truncation::Capped(len) => {
            if len < n {
                return Err(Error::Truncation(format!(
                    "truncation order {len} is below the first frequency n = {n}"
                )));
            }
            (len, dropped(len)?)
        }
        Truncation::Auto { rel_tol, max_len } => {
            let target = rel_tol * tail.value;
            let mut len = n.next_power_of_two();
            loop {
                let d = dropped(len)?;
                if d <= target {
                    break (len, d);
                }
                if len >= max_len {
                    return Err(Error::Truncation(format!(
                        "dropped tail {d:e} after {len} terms exceeds {rel_tol:e}·T_n; \
                         the series decays too slowly for the requested tolerance"
                    )));
                }
                len = (len * 2).min(max_len);
            }
        }
    };
    let scale = lambda / tail.value.powf(1.0 / p);
    let weight = TailWeight::Power(pc);
    let poly = TrigPoly::from_positive((n..=n_trunc).map(|k| {
        let c = 0.5 * scale * weight.term(psi, k as f64);
        (k as i64, Complex64::new(c, 0.0))
    }));
    Ok(ExtremalFp {
        poly,
        lambda,
        tail,
        alpha_n,
        n_trunc,
        dropped_tail,
        dropped_sup: scale * dropped_tail,
    })
}

/// `f_m(ψ; β)`: `(1/8π) e^{∓iβπ/2} ψ(|k|)` on `|k| <= m`, tapered by
/// `2(1 - |k|/(2m))` on `m < |k| < 2m`.
pub fn extremal_fm(psi: &PsiFunction, beta: f64, m: u64) -> Result<TrigPoly> {
    if m == 0 {
        return Err(Error::Domain("f_m needs m >= 1".into()));
    }
    let base = 1.0 / (8.0 * PI);
    Ok(TrigPoly::from_positive((1..=(2 * m - 1)).map(|k| {
        let w = if k <= m {
            1.0
        } else {
            2.0 * (1.0 - k as f64 / (2 * m) as f64)
        };
        let c = phase(beta, k as i64).conj() * (base * w * psi.value(k as f64));
        (k as i64, c)
    })))
}

/// `f*_n(ψ) = (1/5πn)(Σ_{k<=n} kψ(k) cos kt + Σ_{n<k<=2n} (2n+1-k)ψ(k) cos kt)`.
pub fn extremal_fn_star(psi: &PsiFunction, n: u64) -> Result<TrigPoly> {
    if n == 0 {
        return Err(Error::Domain("f*_n needs n >= 1".into()));
    }
    // Σ ψ(k) < ∞ and g = ψ·t ∈ M0
    crate::psi::psi_integral(psi, 1.0)?;
    m0_margin(&WeightedPsi::new(*psi, 1.0)?, 1, "g(t) = ψ(t)t")?;
    let base = 1.0 / (10.0 * PI * n as f64);
    Ok(TrigPoly::from_positive((1..=2 * n).map(|k| {
        let w = if k <= n { k } else { 2 * n + 1 - k } as f64;
        (
            k as i64,
            Complex64::new(base * w * psi.value(k as f64), 0.0),
        )
    })))
}

/// Norm of the (ψ,β)-derivative and whether it lies in the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub norm: f64,
    pub ok: bool,
}

pub const MEMBERSHIP_TOL: f64 = 1e-6;

/// `‖f^ψ_β‖_p <= 1 + tol`, using the rectangle rule (or the sup-norm upper end
/// for `p = ∞`).
pub fn verify_membership(
    f: &TrigPoly,
    spec: &ClassSpec,
    grid: &GridSpec,
    tol: f64,
) -> Result<Membership> {
    let d = psi_beta_derivative(f, &spec.psi, spec.beta);
    let grid = grid.fitted(&d);
    let norm = if spec.p.is_infinite() {
        sup_norm(&d, &grid)?.upper()
    } else if spec.p == 2.0 {
        (2.0 * PI * d.energy()).sqrt()
    } else {
        lp_norm(&d, spec.p, &grid)?
    };
    Ok(Membership {
        norm,
        ok: norm <= 1.0 + tol,
    })
}

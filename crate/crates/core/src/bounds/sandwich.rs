//! Numerical sandwich: the theorem's extremal function is built, its class
//! membership checked, and a certified interval for its `e⊥_{2n}` error is
//! compared with the analytic lower bounds and the theorem's upper bound.

use serde::{Deserialize, Serialize};

use super::report::{BoundsReport, Budgets, Params, Verdict};
use super::{theorem_bounds, Theorem};
use crate::approx::{
    best_orth_approx, dual_lower_bound, dual_witness, evaluation_witness, Metric, Strategy,
};
use crate::error::{Error, Result};
use crate::extremal::{
    extremal_fm, extremal_fn_star, extremal_fp, verify_membership, ClassSpec, Truncation,
    MEMBERSHIP_TOL,
};
use crate::psi::{conjugate_exponent, cutoff_a, cutoff_d, Decay, PsiFunction, TailSum};
use crate::trig::{lp_norm, phase, vallee_poussin, GridSpec, TrigPoly};

use std::f64::consts::PI;

/// Knobs of a sandwich run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichConfig {
    /// Largest dual-functional parameter `l` tried.
    pub l: u64,
    /// Relative verdict tolerance.
    pub tol: f64,
    pub grid: GridSpec,
    /// Minimum number of frequencies kept in `f*_p`.
    pub fp_min_len: u64,
    /// Largest admissible cutoff `A(l;n)` or `D(l;n)`; `l` is lowered until it fits.
    pub max_cutoff: u64,
    pub membership_tol: f64,
}

impl Default for SandwichConfig {
    fn default() -> Self {
        SandwichConfig {
            l: 8,
            tol: 1e-4,
            grid: GridSpec::default(),
            fp_min_len: 1 << 16,
            max_cutoff: 1 << 15,
            membership_tol: MEMBERSHIP_TOL,
        }
    }
}

/// Relative safety margin on numerically integrated `L_1` norms of dual kernels.
const DUAL_NORM_MARGIN: f64 = 1e-6;

/// What a theorem-specific stage measured.
struct Stage {
    lo: f64,
    hi: f64,
    l: Option<u64>,
    membership_norm: f64,
    truncation_rel: f64,
    truncation_sup: f64,
    sup_gap: f64,
    notes: Vec<String>,
}

/// Largest `l <= l_max` whose cutoff stays within `max_cutoff`.
fn feasible_l(
    l_max: u64,
    max_cutoff: u64,
    cutoff: impl Fn(u64) -> Result<u64>,
) -> Result<(u64, u64)> {
    for l in (1..=l_max.max(1)).rev() {
        match cutoff(l) {
            Ok(c) if c <= max_cutoff => return Ok((l, c)),
            Ok(_) | Err(Error::Range { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Truncation(format!(
        "no l in 1..={l_max} keeps the cutoff below {max_cutoff}"
    )))
}

/// `‖V_m‖_1` by the rectangle rule, inflated by the safety margin.
fn vp_dual(m: u64, grid: &GridSpec) -> Result<(TrigPoly, f64)> {
    let v = vallee_poussin(m)?;
    let norm = lp_norm(&v, 1.0, &grid.fitted(&v))? * (1.0 + DUAL_NORM_MARGIN);
    Ok((v, norm))
}

fn membership(
    f: &TrigPoly,
    psi: &PsiFunction,
    beta: f64,
    p: f64,
    cfg: &SandwichConfig,
) -> Result<f64> {
    let spec = ClassSpec::new(*psi, beta, p)?;
    Ok(verify_membership(f, &spec, &cfg.grid, cfg.membership_tol)?.norm)
}

fn stage_t1(psi: &PsiFunction, beta: f64, p: f64, n: u64, cfg: &SandwichConfig) -> Result<Stage> {
    let pc = conjugate_exponent(p);
    let (l, a) = feasible_l(cfg.l, cfg.max_cutoff, |l| cutoff_a(psi, pc, l, n))?;
    let f = extremal_fp(
        psi,
        p,
        n,
        Truncation::Capped((2 * a - 1).max(cfg.fp_min_len)),
    )?;
    let mut notes = Vec::new();
    let mut norm = membership(&f.poly, psi, beta, p, cfg)?;
    if p == 2.0 {
        // exact contribution of the dropped frequencies by Parseval
        norm = (norm * norm + PI * f.lambda * f.lambda * f.dropped_tail / f.tail.value).sqrt();
    } else {
        notes.push("membership measured on the truncated polynomial".into());
    }
    let remove = 2 * n as usize;
    let (v, v_norm) = vp_dual(a, &cfg.grid)?;
    let dual = dual_witness(&f.poly, &v, v_norm, remove);
    let point = evaluation_witness(&f.poly, 0.0, remove);
    let approx = best_orth_approx(
        &f.poly,
        remove,
        Metric::Sup,
        Strategy::SymmetricPairs,
        &cfg.grid,
    )?;
    Ok(Stage {
        lo: dual.value.max(point.value),
        hi: approx.error_upper + f.dropped_sup,
        l: Some(l),
        membership_norm: norm,
        truncation_rel: f.dropped_tail / f.tail.value,
        truncation_sup: f.dropped_sup,
        sup_gap: approx.error_upper - approx.error,
        notes,
    })
}

/// Dual polynomial of the `L_s` case: `Σ_{n<=k<2m} ψ^{s-1}(k) k^{s-2} cos(kt - βπ/2)`.
fn t2_dual(psi: &PsiFunction, beta: f64, s: f64, n: u64, m: u64) -> TrigPoly {
    TrigPoly::from_positive((n..2 * m).map(|k| {
        let kf = k as f64;
        let a = psi.value(kf).powf(s - 1.0) * kf.powf(s - 2.0);
        (k as i64, phase(beta, k as i64).conj() * (0.5 * a))
    }))
}

fn stage_t2(psi: &PsiFunction, beta: f64, s: f64, n: u64, cfg: &SandwichConfig) -> Result<Stage> {
    let sc = conjugate_exponent(s);
    let (l, m) = feasible_l(cfg.l, cfg.max_cutoff, |l| cutoff_a(psi, s, l, n))?;
    let f = extremal_fm(psi, beta, m)?;
    let norm = membership(&f, psi, beta, 1.0, cfg)?;
    let remove = 2 * n as usize;
    let g = t2_dual(psi, beta, s, n, m);
    let g_norm = if sc == 2.0 {
        (2.0 * PI * g.energy()).sqrt()
    } else {
        lp_norm(&g, sc, &cfg.grid.fitted(&g))? * (1.0 + DUAL_NORM_MARGIN)
    };
    let dual = dual_witness(&f, &g, g_norm, remove);
    let mut notes = Vec::new();
    let (lo, hi) = if s == 2.0 {
        // Greedy is optimal in L_2, so the error is known exactly
        let exact = best_orth_approx(&f, remove, Metric::Lp(2.0), Strategy::Greedy, &cfg.grid)?;
        if dual.value > exact.error * (1.0 + 1e-12) {
            return Err(Error::Hypothesis(format!(
                "dual witness {} exceeds the exact error {}",
                dual.value, exact.error
            )));
        }
        notes.push(format!(
            "exact L_2 error by Parseval; dual witness {:.6e}",
            dual.value
        ));
        (exact.error, exact.error)
    } else {
        let approx = best_orth_approx(
            &f,
            remove,
            Metric::Lp(s),
            Strategy::SymmetricPairs,
            &cfg.grid,
        )?;
        (dual.value, approx.error_upper)
    };
    Ok(Stage {
        lo,
        hi,
        l: Some(l),
        membership_norm: norm,
        truncation_rel: 0.0,
        truncation_sup: 0.0,
        sup_gap: 0.0,
        notes,
    })
}

fn uniform_stage(
    f: &TrigPoly,
    v: (TrigPoly, f64),
    psi: &PsiFunction,
    beta: f64,
    n: u64,
    l: Option<u64>,
    cfg: &SandwichConfig,
) -> Result<Stage> {
    let norm = membership(f, psi, beta, 1.0, cfg)?;
    let remove = 2 * n as usize;
    let dual = dual_witness(f, &v.0, v.1, remove);
    let point = evaluation_witness(f, 0.0, remove);
    let approx = best_orth_approx(f, remove, Metric::Sup, Strategy::SymmetricPairs, &cfg.grid)?;
    Ok(Stage {
        lo: dual.value.max(point.value),
        hi: approx.error_upper,
        l,
        membership_norm: norm,
        truncation_rel: 0.0,
        truncation_sup: 0.0,
        sup_gap: approx.error_upper - approx.error,
        notes: Vec::new(),
    })
}

fn stage_t3(psi: &PsiFunction, beta: f64, n: u64, cfg: &SandwichConfig) -> Result<Stage> {
    let (l, d) = feasible_l(cfg.l, cfg.max_cutoff, |l| cutoff_d(psi, l, n))?;
    let f = extremal_fm(psi, beta, d)?;
    uniform_stage(&f, vp_dual(d, &cfg.grid)?, psi, beta, n, Some(l), cfg)
}

fn stage_t4(psi: &PsiFunction, beta: f64, n: u64, cfg: &SandwichConfig) -> Result<Stage> {
    let f = extremal_fn_star(psi, n)?;
    uniform_stage(&f, vp_dual(2 * n, &cfg.grid)?, psi, beta, n, None, cfg)
}

fn relative_width(t: &TailSum) -> f64 {
    if t.value > 0.0 {
        t.error_bound / t.value
    } else {
        0.0
    }
}

/// Runs the full verification; every failure is reported in the verdict.
pub fn sandwich_check(
    theorem: Theorem,
    psi: &PsiFunction,
    beta: f64,
    p_or_s: f64,
    n: u64,
    cfg: &SandwichConfig,
) -> BoundsReport {
    let resolved = theorem.resolve(beta);
    let (p, s) = match resolved {
        Theorem::T1 => (p_or_s, f64::INFINITY),
        Theorem::T2 => (1.0, p_or_s),
        _ => (1.0, f64::INFINITY),
    };
    let mut params = Params {
        psi: *psi,
        beta,
        p,
        s,
        n,
        l: None,
    };
    let bounds = match theorem_bounds(resolved, psi, beta, p_or_s, n) {
        Ok(b) => b,
        Err(e) => return BoundsReport::failed(resolved, params, e.to_string()),
    };
    let stage = match resolved {
        Theorem::T1 => stage_t1(psi, beta, p_or_s, n, cfg),
        Theorem::T2 => stage_t2(psi, beta, p_or_s, n, cfg),
        Theorem::T3 => stage_t3(psi, beta, n, cfg),
        _ => stage_t4(psi, beta, n, cfg),
    };
    let stage = match stage {
        Ok(st) => st,
        Err(e) => {
            let mut r = BoundsReport::failed(resolved, params, e.to_string());
            r.lower = bounds.lower;
            r.upper = bounds.upper;
            return r;
        }
    };
    params.l = stage.l;
    let dual_lower = match dual_lower_bound(resolved, psi, beta, p_or_s, n, stage.l) {
        Ok(v) => v,
        Err(e) => return BoundsReport::failed(resolved, params, e.to_string()),
    };

    let tol = cfg.tol;
    let floor = bounds.lower.max(dual_lower);
    let mut notes = bounds.hypotheses.notes.clone();
    notes.extend(stage.notes);
    let member = stage.membership_norm <= 1.0 + cfg.membership_tol;
    let verdict = if !member {
        notes.push(format!(
            "extremal function outside the class: derivative norm {}",
            stage.membership_norm
        ));
        Verdict::Fail
    } else if stage.hi < floor * (1.0 - tol)
        || stage.lo > bounds.upper * (1.0 + tol)
        || stage.lo > stage.hi
    {
        notes.push("measured interval lies outside the bounds".into());
        Verdict::Fail
    } else if stage.lo < floor * (1.0 - tol) || stage.hi > bounds.upper * (1.0 + tol) {
        notes.push("measured interval straddles a bound".into());
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };

    BoundsReport {
        theorem: resolved,
        params,
        lower: bounds.lower,
        upper: bounds.upper,
        measured: [stage.lo, stage.hi],
        dual_lower,
        verdict,
        budgets: Budgets {
            tol,
            tail_sum_rel: relative_width(&bounds.tail),
            truncation_rel: stage.truncation_rel,
            truncation_sup: stage.truncation_sup,
            sup_gap: stage.sup_gap,
            dual_norm_rel: DUAL_NORM_MARGIN,
            membership_norm: stage.membership_norm,
        },
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t4_example_passes() {
        let psi = PsiFunction::power(2.0).unwrap();
        let r = sandwich_check(Theorem::T4, &psi, 1.0, 1.0, 2, &SandwichConfig::default());
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.measured[0] >= 1.326e-3);
        assert!((r.dual_lower - 0.125 / (30.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn violated_hypothesis_fails() {
        let psi = PsiFunction::power(2.0).unwrap();
        let r = sandwich_check(Theorem::T3, &psi, 1.0, 1.0, 2, &SandwichConfig::default());
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.notes[0].contains("cos"));
    }

    #[test]
    fn feasible_l_lowers_until_fit() {
        let (l, c) = feasible_l(8, 100, |l| Ok(10 * l * l)).unwrap();
        assert_eq!((l, c), (3, 90));
        assert!(feasible_l(2, 5, |l| Ok(10 * l)).is_err());
    }
}

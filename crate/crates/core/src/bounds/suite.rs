//! The default verification suite: nine numerical acceptance checks shared by
//! the `verify` subcommand and the test-suite.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::time::Instant;

use super::lemmas::{lemma1_check, lemma2_check, tail_cutoff_check};
use super::report::{BoundsReport, Verdict};
use super::sandwich::{sandwich_check, SandwichConfig};
use super::tables::{order_table, parse_n_list, Corollary, OrderTable, TableConfig};
use super::{constants_k, Theorem};
use crate::approx::{best_orth_approx, Metric, Strategy};
use crate::error::{Error, Result};
use crate::psi::{cutoff_a, phi_s, phi_s_inverse, tail_sum, Decay, PsiFunction};
use crate::trig::{
    lp_norm, psi_beta_derivative, psi_beta_integral, vallee_poussin, GridSpec, TrigPoly,
};

/// Outcome of one acceptance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    /// Wall-clock budget, if the check has one.
    pub budget_seconds: Option<f64>,
}

/// A criterion together with the sandwich reports and tables it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub outcome: CriterionOutcome,
    pub reports: Vec<BoundsReport>,
    pub tables: Vec<OrderTable>,
}

impl Criterion {
    pub fn line(&self) -> String {
        let o = &self.outcome;
        format!(
            "criterion {:>2} [{}] {} ({:.2} s): {}",
            o.id,
            if o.passed { "PASS" } else { "FAIL" },
            o.title,
            o.seconds,
            o.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub all_pass: bool,
    pub criteria: Vec<CriterionOutcome>,
    pub reports: Vec<BoundsReport>,
    pub tables: Vec<OrderTable>,
}

#[derive(Default)]
struct Findings {
    ok: bool,
    detail: String,
    reports: Vec<BoundsReport>,
    tables: Vec<OrderTable>,
}

fn timed(
    id: u8,
    title: &str,
    budget: Option<f64>,
    body: impl FnOnce() -> Result<Findings>,
) -> Criterion {
    let start = Instant::now();
    let result = body();
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail, reports, tables) = match result {
        Ok(f) => (f.ok, f.detail, f.reports, f.tables),
        Err(e) => (false, format!("error: {e}"), Vec::new(), Vec::new()),
    };
    if let Some(b) = budget {
        if seconds >= b {
            passed = false;
            detail.push_str(&format!("; runtime {seconds:.2} s exceeds {b} s"));
        }
    }
    Criterion {
        outcome: CriterionOutcome {
            id,
            title: title.into(),
            passed,
            detail,
            seconds,
            budget_seconds: budget,
        },
        reports,
        tables,
    }
}

/// Seed shared by all randomised checks.
pub const SUITE_SEED: u64 = 0x5eed_0fc0_ffee;

/// A random real trigonometric polynomial with frequencies in `0..=max_k`
/// (`mean_zero` drops `k = 0`) and at most `terms` positive frequencies.
pub fn random_real_poly(rng: &mut impl Rng, max_k: i64, terms: usize, mean_zero: bool) -> TrigPoly {
    let lo = if mean_zero { 1 } else { 0 };
    let mut ks: Vec<i64> = (lo..=max_k).collect();
    let count = rng.gen_range(1..=terms.min(ks.len()));
    let mut chosen = Vec::with_capacity(count);
    for _ in 0..count {
        let i = rng.gen_range(0..ks.len());
        chosen.push(ks.swap_remove(i));
    }
    TrigPoly::from_positive(chosen.into_iter().map(|k| {
        let re = rng.gen_range(-1.0..1.0);
        let im = if k == 0 {
            0.0
        } else {
            rng.gen_range(-1.0..1.0)
        };
        (k, Complex64::new(re, im))
    }))
}

/// 1. `‖V_m‖_1 <= 3π` for `m = 1..=64` on 8192 nodes.
pub fn vallee_poussin_norms() -> Criterion {
    timed(
        1,
        "Vallée-Poussin kernels: ‖V_m‖₁ ≤ 3π",
        Some(10.0),
        || {
            let grid = GridSpec::new(8192, 0);
            let mut worst: f64 = 0.0;
            for m in 1..=64 {
                worst = worst.max(lp_norm(&vallee_poussin(m)?, 1.0, &grid)?);
            }
            Ok(Findings {
                ok: worst <= 3.0 * PI + 1e-6,
                detail: format!("max_m ‖V_m‖₁ = {worst:.9} vs 3π = {:.9}", 3.0 * PI),
                ..Default::default()
            })
        },
    )
}

/// 2. Quadrature `L_2` norm against Parseval on 200 random polynomials.
pub fn parseval_agreement() -> Criterion {
    timed(
        2,
        "Parseval agreement of the L₂ quadrature",
        Some(5.0),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
            let grid = GridSpec::default();
            let mut worst: f64 = 0.0;
            for _ in 0..200 {
                let f = random_real_poly(&mut rng, 64, 65, false);
                let quad = lp_norm(&f, 2.0, &grid)?;
                let exact = (2.0 * PI * f.energy()).sqrt();
                worst = worst.max((quad - exact).abs() / exact);
            }
            Ok(Findings {
                ok: worst <= 1e-9,
                detail: format!("200 polynomials, max relative deviation {worst:.3e}"),
                ..Default::default()
            })
        },
    )
}

/// 3. Greedy equals Exhaustive in `L_2` (support ≤ 12, m ≤ 6).
pub fn greedy_optimality() -> Criterion {
    timed(3, "Greedy = Exhaustive at s = 2", Some(30.0), || {
        let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 3);
        let grid = GridSpec::default();
        let (mut cases, mut worst) = (0usize, 0.0f64);
        for _ in 0..100 {
            let f = random_real_poly(&mut rng, 20, 6, true);
            for m in 0..=6 {
                let g = best_orth_approx(&f, m, Metric::Lp(2.0), Strategy::Greedy, &grid)?;
                let e = best_orth_approx(&f, m, Metric::Lp(2.0), Strategy::Exhaustive, &grid)?;
                worst = worst.max((g.error - e.error).abs());
                cases += 1;
            }
        }
        Ok(Findings {
            ok: worst <= 1e-12 && cases >= 500,
            detail: format!("{cases} cases, max |greedy - exhaustive| = {worst:.3e}"),
            ..Default::default()
        })
    })
}

fn sandwich_grid(
    theorem: Theorem,
    psi: &PsiFunction,
    p: f64,
    betas: &[f64],
    ns: &[u64],
) -> Vec<BoundsReport> {
    let cfg = SandwichConfig::default();
    let mut out = Vec::new();
    for &beta in betas {
        for &n in ns {
            out.push(sandwich_check(theorem, psi, beta, p, n, &cfg));
        }
    }
    out
}

fn summarize(reports: &[BoundsReport]) -> (bool, String) {
    let passed = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Pass)
        .count();
    let mut detail = format!("{passed}/{} Pass", reports.len());
    for r in reports.iter().filter(|r| r.verdict != Verdict::Pass) {
        detail.push_str(&format!(
            "; β={} n={} {}: {}",
            r.params.beta,
            r.params.n,
            r.verdict,
            r.notes.join(" | ")
        ));
    }
    (passed == reports.len(), detail)
}

/// 4. Sandwich for the uniform metric, `L^ψ_{β,2}` with `ψ = t^{-3/4}`.
pub fn theorem1_sandwich() -> Criterion {
    timed(
        4,
        "uniform-metric sandwich for L^ψ_{β,2}, ψ = t^(-3/4)",
        Some(60.0),
        || {
            let psi = PsiFunction::power(0.75)?;
            let c = constants_k(&psi, 2.0)?;
            let constants_ok =
                (c.k1 - 9.69e-4).abs() <= 1e-3 * 9.69e-4 * 1.1 && (c.k2 - 54.72).abs() <= 0.01;
            let reports = sandwich_grid(Theorem::T1, &psi, 2.0, &[0.0, 0.5, 1.0], &[2, 4, 8]);
            let (all, detail) = summarize(&reports);
            Ok(Findings {
                ok: all && constants_ok,
                detail: format!("K1 = {:.6e}, K2 = {:.4}; {detail}", c.k1, c.k2),
                reports,
                ..Default::default()
            })
        },
    )
}

/// 5. Sandwich in `L_2` for `L^ψ_{β,1}`, built at `m = A_2(l;n) = 4l²n + 2n`.
pub fn theorem2_sandwich() -> Criterion {
    timed(
        5,
        "L₂ sandwich for L^ψ_{β,1}, ψ = t^(-3/4)",
        Some(60.0),
        || {
            let psi = PsiFunction::power(0.75)?;
            let mut closed_form = true;
            for n in [2u64, 4] {
                for l in 1..=8u64 {
                    closed_form &= cutoff_a(&psi, 2.0, l, n)? == 4 * l * l * n + 2 * n;
                }
            }
            let reports = sandwich_grid(Theorem::T2, &psi, 2.0, &[0.0, 0.5, 1.0], &[2, 4]);
            let (all, detail) = summarize(&reports);
            Ok(Findings {
                ok: all && closed_form,
                detail: format!("A_2(l;n) = 4l²n+2n: {closed_form}; {detail}"),
                reports,
                ..Default::default()
            })
        },
    )
}

/// 6. Uniform-metric sandwiches for `L^ψ_{β,1}` with `ψ = t^{-2}`.
pub fn theorem34_sandwich() -> Criterion {
    timed(
        6,
        "uniform-metric sandwiches for L^ψ_{β,1}, ψ = t^(-2)",
        Some(60.0),
        || {
            let psi = PsiFunction::power(2.0)?;
            let mut reports = sandwich_grid(Theorem::T3, &psi, 1.0, &[0.0], &[2, 4, 8]);
            reports.extend(sandwich_grid(Theorem::T4, &psi, 1.0, &[1.0], &[2, 4, 8]));
            let mut uppers_ok = true;
            for r in &reports {
                let n = r.params.n;
                let expected = match r.theorem {
                    Theorem::T3 => tail_sum(&psi, 1.0, n)?.value / PI,
                    _ => (1.0 + 2.0 / PI) * psi.value(n as f64) * n as f64,
                };
                uppers_ok &= (r.upper - expected).abs() <= 1e-9 * expected;
            }
            let (all, detail) = summarize(&reports);
            Ok(Findings {
                ok: all && uppers_ok,
                detail: format!("upper bounds match closed forms: {uppers_ok}; {detail}"),
                reports,
                ..Default::default()
            })
        },
    )
}

/// Families and metric exponents for the first lemma.
pub fn lemma1_families() -> Result<Vec<(PsiFunction, f64)>> {
    Ok(vec![
        (PsiFunction::power(0.75)?, 2.0),
        (PsiFunction::power(1.5)?, 3.0),
        (PsiFunction::power(0.9)?, 1.5),
        (PsiFunction::log_power_min_shift(2.0, 1.0)?, 2.0),
        (PsiFunction::log_power_min_shift(3.0, 1.0)?, 1.5),
        (PsiFunction::loglog_power_min_shift(2.0, 0.5, 1.0)?, 2.0),
    ])
}

/// Families for the second lemma.
pub fn lemma2_families() -> Result<Vec<PsiFunction>> {
    Ok(vec![
        PsiFunction::power(2.0)?,
        PsiFunction::power(3.5)?,
        PsiFunction::log_power(1.0, 2.0, 1.0)?,
        PsiFunction::loglog_power(1.0, 1.0, 2.0, 1.0, 2.0)?,
    ])
}

/// 7. Lemma inequalities for `n = 1..=64`, and the cutoff property of `A_s(l;n)`.
pub fn lemma_suites() -> Criterion {
    timed(7, "tail-sum lemmas", Some(10.0), || {
        let (mut checked, mut failures) = (0usize, Vec::new());
        for (psi, s) in lemma1_families()? {
            for n in 1..=64 {
                let c = lemma1_check(&psi, s, n)?;
                checked += 1;
                if !c.holds {
                    failures.push(format!("lemma1 {psi} s={s} n={n}"));
                }
            }
        }
        for psi in lemma2_families()? {
            for n in 1..=64 {
                let c = lemma2_check(&psi, n)?;
                checked += 1;
                if !c.holds {
                    failures.push(format!("lemma2 {psi} n={n}"));
                }
            }
        }
        let psi = PsiFunction::power(0.75)?;
        for l in [1, 2, 4] {
            for n in [2, 4, 8] {
                checked += 1;
                if !tail_cutoff_check(&psi, 2.0, l, n)?.holds {
                    failures.push(format!("cutoff l={l} n={n}"));
                }
            }
        }
        Ok(Findings {
            ok: failures.is_empty(),
            detail: format!(
                "{checked} inequalities, {} violations {:?}",
                failures.len(),
                failures
            ),
            ..Default::default()
        })
    })
}

/// 8. Order tables: the log-power corollary, the power case and the dichotomy.
pub fn order_tables() -> Criterion {
    timed(8, "order tables", Some(30.0), || {
        let cfg = TableConfig::default();
        let log = PsiFunction::log_power_min_shift(2.0, 1.0)?;
        let c2 = order_table(Corollary::C2, &log, &parse_n_list("16..4096")?, &cfg)?;
        let power = PsiFunction::power(2.0)?;
        let c4_sum = order_table(Corollary::C4, &power, &parse_n_list("4..256")?, &cfg)?;
        let c4_point = order_table(
            Corollary::C4,
            &power,
            &parse_n_list("4..256")?,
            &TableConfig { beta: 1.0, ..cfg },
        )?;
        let dich = PsiFunction::log_power(1.0, 2.0, 1.0)?;
        let t5 = order_table(Corollary::T5, &dich, &parse_n_list("16..4096")?, &cfg)?;
        let ok = c2.band < 2.0
            && c4_sum.band < 2.0
            && c4_point.band < 2.0
            && t5.verdict == Verdict::Pass
            && t5.growth >= 2.0;
        Ok(Findings {
            ok,
            detail: format!(
                "C2 band {:.4}; C4 band {:.4} (sum form), {:.4} (point form); T5 ratio growth {:.3}",
                c2.band, c4_sum.band, c4_point.band, t5.growth
            ),
            tables: vec![c2, c4_sum, c4_point, t5],
            ..Default::default()
        })
    })
}

/// Relative coefficient-wise discrepancy between two polynomials.
pub fn coefficient_discrepancy(a: &TrigPoly, b: &TrigPoly) -> f64 {
    let mut worst: f64 = 0.0;
    for k in a.support().into_iter().chain(b.support()) {
        let (x, y) = (a.coeff(k), b.coeff(k));
        let scale = x.norm().max(y.norm());
        if scale > 0.0 {
            worst = worst.max((x - y).norm() / scale);
        } else {
            return f64::INFINITY;
        }
    }
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    worst
}

/// Log-spaced targets in the representable part of `(0, Φ_s(1)]`.
pub fn inverse_probes(psi: &PsiFunction, s: f64, count: usize) -> Result<Vec<f64>> {
    let top = phi_s(psi, s, 1.0)?;
    // below ~1e-250 the targets leave the normal range of f64
    let bottom = phi_s(psi, s, 1e200)?.max(1e-250);
    let (a, b) = (top.ln(), bottom.ln());
    Ok((0..count)
        .map(|j| (a + (b - a) * j as f64 / (count - 1) as f64).exp())
        .collect())
}

/// 9. Derivative/integral round trips and `Φ_s` inversion.
pub fn round_trips() -> Criterion {
    timed(9, "round trips", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 9);
        let families = [
            PsiFunction::power(0.75)?,
            PsiFunction::power(2.0)?,
            PsiFunction::log_power_min_shift(2.0, 1.0)?,
            PsiFunction::loglog_power_min_shift(2.0, 0.5, 1.0)?,
        ];
        let mut worst_coeff: f64 = 0.0;
        for i in 0..100 {
            let f = random_real_poly(&mut rng, 64, 32, true);
            let psi = &families[i % families.len()];
            let beta = rng.gen_range(-3.0..3.0);
            let back = psi_beta_derivative(&psi_beta_integral(&f, psi, beta), psi, beta);
            worst_coeff = worst_coeff.max(coefficient_discrepancy(&back, &f));
        }
        let mut worst_inv: f64 = 0.0;
        for psi in &families {
            let s = 2.0;
            for y in inverse_probes(psi, s, 25)? {
                let x = phi_s_inverse(psi, s, y)?;
                worst_inv = worst_inv.max((phi_s(psi, s, x)? - y).abs() / y);
            }
        }
        let ok = worst_coeff <= 1e-13 && worst_inv <= 1e-8;
        Ok(Findings {
            ok,
            detail: format!(
                "100 polynomials, max coefficient deviation {worst_coeff:.3e}; Φ_s inverse max relative residual {worst_inv:.3e}"
            ),
            ..Default::default()
        })
    })
}

/// Runs a named suite; only `default` exists.
pub fn run_suite(name: &str) -> Result<(SuiteReport, Vec<Criterion>)> {
    if name != "default" {
        return Err(Error::Parse(format!(
            "unknown suite '{name}' (expected 'default')"
        )));
    }
    let criteria = vec![
        vallee_poussin_norms(),
        parseval_agreement(),
        greedy_optimality(),
        theorem1_sandwich(),
        theorem2_sandwich(),
        theorem34_sandwich(),
        lemma_suites(),
        order_tables(),
        round_trips(),
    ];
    let report = SuiteReport {
        suite: name.into(),
        all_pass: criteria.iter().all(|c| c.outcome.passed),
        criteria: criteria.iter().map(|c| c.outcome.clone()).collect(),
        reports: criteria.iter().flat_map(|c| c.reports.clone()).collect(),
        tables: criteria.iter().flat_map(|c| c.tables.clone()).collect(),
    };
    Ok((report, criteria))
}

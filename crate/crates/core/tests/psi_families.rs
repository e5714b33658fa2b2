//! Decay families: characteristic, classification, tail integrals, cutoffs
//! and certified tail sums, checked against independent oracles.

use approx::assert_relative_eq;
use proptest::prelude::*;
use std::f64::consts::{E, PI};

use psi_approx::psi::{
    alpha, alpha_inf, alpha_sup, check_shape, classify, cutoff_a, cutoff_d, phi_s, phi_s_inverse,
    psi_integral, tail_sum, Decay, Membership, PsiFunction, SearchGrid, WeightedPsi,
};
use psi_approx::Error;

fn log_power() -> PsiFunction {
    PsiFunction::log_power(2.0, 1.0, E * E - 1.0).unwrap()
}

fn families() -> Vec<PsiFunction> {
    vec![
        PsiFunction::power(0.75).unwrap(),
        PsiFunction::power(2.0).unwrap(),
        log_power(),
        PsiFunction::log_power(1.0, 2.0, 1.0).unwrap(),
        PsiFunction::loglog_power_min_shift(2.0, 0.5, 1.0).unwrap(),
        PsiFunction::loglog_power(1.0, 1.0, 2.0, 1.0, 2.0).unwrap(),
    ]
}

/// `ψ(t)/(t|ψ'(t)|)` with a central difference in `ln t` (oracle only).
fn alpha_by_differences<D: Decay>(f: &D, t: f64) -> f64 {
    let h = 1e-5f64;
    let (up, down) = (f.value(t * h.exp()), f.value(t * (-h).exp()));
    let dlog = (up.ln() - down.ln()) / (2.0 * h);
    1.0 / dlog.abs()
}

/// `∫_x^∞ h(t) dt` by composite Simpson in `u = ln t` over `[ln x, U]`, plus
/// the supplied closed-form estimate of the part beyond `e^U`.
fn simpson_tail(h: impl Fn(f64) -> f64, x: f64, u_max: f64, beyond: f64) -> f64 {
    let steps = 400_000;
    let (a, b) = (x.ln(), u_max);
    let w = (b - a) / steps as f64;
    let g = |u: f64| {
        let t = u.exp();
        h(t) * t
    };
    let mut acc = g(a) + g(b);
    for i in 1..steps {
        acc += g(a + i as f64 * w) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * w / 3.0 + beyond
}

#[test]
fn alpha_power_examples() {
    let psi = PsiFunction::power(0.75).unwrap();
    for t in [1.0, 2.5, 1e3, 1e8] {
        assert_relative_eq!(alpha(&psi, t).unwrap(), 1.0 / 0.75, max_relative = 1e-15);
        let g = WeightedPsi::new(psi, 2.0).unwrap();
        assert_relative_eq!(alpha(&g, t).unwrap(), 4.0, max_relative = 1e-14);
    }
}

#[test]
fn alpha_weighted_log_power_at_one() {
    // g₂ = ln^{-γ}(t+K): α = (t+K)ln(t+K)/(γt); at t = 1 with K = e²-1 this is 2e²
    let g = WeightedPsi::new(log_power(), 2.0).unwrap();
    assert_relative_eq!(alpha(&g, 1.0).unwrap(), 2.0 * E * E, max_relative = 1e-12);
}

#[test]
fn alpha_matches_finite_differences() {
    for psi in families() {
        for t in [1.0, 3.0, 17.0, 1e4, 1e7] {
            let exact = alpha(&psi, t).unwrap();
            let fd = alpha_by_differences(&psi, t);
            assert_relative_eq!(exact, fd, max_relative = 1e-7);
            let g = WeightedPsi::new(psi, 1.0).unwrap();
            assert_relative_eq!(
                alpha(&g, t).unwrap(),
                alpha_by_differences(&g, t),
                max_relative = 1e-6
            );
        }
    }
}

#[test]
fn alpha_domain() {
    let psi = PsiFunction::power(2.0).unwrap();
    assert!(matches!(alpha(&psi, 0.999), Err(Error::Domain(_))));
}

#[test]
fn alpha_inf_and_sup_examples() {
    let cfg = SearchGrid::default();
    let g = WeightedPsi::new(PsiFunction::power(0.75).unwrap(), 2.0).unwrap();
    assert_relative_eq!(alpha_inf(&g, 1.0, &cfg), 4.0, max_relative = 1e-14);
    assert_relative_eq!(alpha_sup(&g, 1.0, &cfg), 4.0, max_relative = 1e-14);
    let g1 = WeightedPsi::new(PsiFunction::power(2.0).unwrap(), 1.0).unwrap();
    assert_relative_eq!(alpha_inf(&g1, 5.0, &cfg), 1.0, max_relative = 1e-14);
    assert_relative_eq!(alpha_sup(&g1, 1.0, &cfg), 1.0, max_relative = 1e-14);
    let gl = WeightedPsi::new(log_power(), 2.0).unwrap();
    assert!(alpha_sup(&gl, 1.0, &cfg).is_infinite());
}

#[test]
fn alpha_inf_log_power_against_dense_scan() {
    // (t+K)ln(t+K)/(γt) first decreases, so the infimum is interior
    let g = WeightedPsi::new(log_power(), 2.0).unwrap();
    let k = E * E - 1.0;
    let scan = (0..2_000_000)
        .map(|i| 1.0 + i as f64 * 1e-4)
        .map(|t| (t + k) * (t + k).ln() / t)
        .fold(f64::INFINITY, f64::min);
    let inf = alpha_inf(&g, 1.0, &SearchGrid::default());
    assert_relative_eq!(inf, scan, max_relative = 1e-9);
    assert!(inf < alpha(&g, 1.0).unwrap());
}

#[test]
fn classification_examples() {
    let cfg = SearchGrid::default();
    let mc = classify(
        &WeightedPsi::new(PsiFunction::power(0.75).unwrap(), 2.0).unwrap(),
        &cfg,
    );
    assert_eq!(mc.verdict, Membership::MC);
    assert_relative_eq!(mc.lower_margin, 4.0, max_relative = 1e-14);
    assert_relative_eq!(mc.upper_margin, 4.0, max_relative = 1e-14);
    let m0 = classify(&WeightedPsi::new(log_power(), 2.0).unwrap(), &cfg);
    assert_eq!(m0.verdict, Membership::M0);
    assert!(m0.in_m0());
    let weyl = classify(
        &WeightedPsi::new(PsiFunction::power(2.0).unwrap(), 1.0).unwrap(),
        &cfg,
    );
    assert_eq!(weyl.verdict, Membership::MC);
}

#[test]
fn construction_constraints() {
    assert!(PsiFunction::power(0.0).is_err());
    assert!(PsiFunction::log_power(2.0, 1.0, E * E - 1.5).is_err());
    assert!(PsiFunction::log_power(2.0, 0.4, 100.0).is_err());
    // K₂ below K₁·e^{max{(γ+δ)p', e}} - 1
    assert!(PsiFunction::loglog_power(2.0, 0.5, 1.0, 20.0, 21.0).is_err());
    for psi in families() {
        assert!(check_shape(&psi, &SearchGrid::default()), "{psi}");
    }
}

#[test]
fn phi_s_power_examples() {
    let psi = PsiFunction::power(0.75).unwrap();
    assert_relative_eq!(phi_s(&psi, 2.0, 4.0).unwrap(), 1.0, max_relative = 1e-14);
    assert_relative_eq!(phi_s(&psi, 2.0, 1.0).unwrap(), 2.0, max_relative = 1e-14);
    let weyl = PsiFunction::power(2.0).unwrap();
    assert_relative_eq!(
        psi_integral(&weyl, 3.0).unwrap(),
        1.0 / 3.0,
        max_relative = 1e-14
    );
    assert!(matches!(
        phi_s(&PsiFunction::power(0.5).unwrap(), 2.0, 1.0),
        Err(Error::Divergence(_))
    ));
}

#[test]
fn phi_s_log_families_against_simpson() {
    // log-power, s = 2: h(e^u)e^u = ln^{-2}(e^u + K) ≈ u^{-2} beyond U
    let psi = log_power();
    let u_max = 600.0;
    for x in [1.0, 10.0, 1e4] {
        let oracle = simpson_tail(|t| psi.value(t).powi(2), x, u_max, 1.0 / u_max);
        assert_relative_eq!(phi_s(&psi, 2.0, x).unwrap(), oracle, max_relative = 1e-6);
    }
    // p = 1 log-power, plain tail: ψ(e^u)e^u = ln^{-2}(e^u + 1)
    let psi1 = PsiFunction::log_power(1.0, 2.0, 1.0).unwrap();
    for x in [1.0, 50.0] {
        let oracle = simpson_tail(|t| psi1.value(t), x, u_max, 1.0 / u_max);
        assert_relative_eq!(psi_integral(&psi1, x).unwrap(), oracle, max_relative = 1e-6);
    }
}

#[test]
fn phi_s_inverse_examples() {
    let psi = PsiFunction::power(0.75).unwrap();
    assert_relative_eq!(
        phi_s_inverse(&psi, 2.0, 0.5).unwrap(),
        16.0,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        phi_s_inverse(&psi, 2.0, 2.0).unwrap(),
        1.0,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        phi_s_inverse(&psi, 2.0, 1.0).unwrap(),
        4.0,
        max_relative = 1e-9
    );
    assert!(matches!(
        phi_s_inverse(&psi, 2.0, 2.5),
        Err(Error::Range { .. })
    ));
}

#[test]
fn cutoff_examples() {
    let psi = PsiFunction::power(0.75).unwrap();
    assert_eq!(cutoff_a(&psi, 2.0, 1, 4).unwrap(), 24);
    assert_eq!(cutoff_a(&psi, 2.0, 2, 4).unwrap(), 72);
    assert_eq!(cutoff_a(&psi, 2.0, 1, 1).unwrap(), 6);
    for l in 1..=8 {
        for n in 1..=16 {
            assert_eq!(cutoff_a(&psi, 2.0, l, n).unwrap(), 4 * l * l * n + 2 * n);
        }
    }
    let weyl = PsiFunction::power(2.0).unwrap();
    assert_eq!(cutoff_d(&weyl, 1, 3).unwrap(), 12);
    assert_eq!(cutoff_d(&weyl, 3, 2).unwrap(), 16);
    assert_eq!(cutoff_d(&weyl, 1, 1).unwrap(), 4);
    assert!(cutoff_d(&PsiFunction::power(0.75).unwrap(), 1, 1).is_err());
}

/// `Σ_{k>=n} k^{-a}` by direct summation to `N` plus the Euler–Maclaurin tail.
fn zeta_tail(a: f64, n: u64) -> f64 {
    let big = 2_000_000u64;
    let head: f64 = (n..big).rev().map(|k| (k as f64).powf(-a)).sum();
    let nb = big as f64;
    head + nb.powf(1.0 - a) / (a - 1.0) + 0.5 * nb.powf(-a) + a / 12.0 * nb.powf(-a - 1.0)
}

#[test]
fn tail_sum_examples() {
    let z = tail_sum(&PsiFunction::power(0.75).unwrap(), 2.0, 1).unwrap();
    assert_relative_eq!(z.value, 2.612_375_348_685_488, max_relative = 1e-8);
    assert!(z.lower() <= 2.612_375_348_685_488 && 2.612_375_348_685_488 <= z.upper());
    let b = tail_sum(&PsiFunction::power(2.0).unwrap(), 1.0, 1).unwrap();
    assert_relative_eq!(b.value, PI * PI / 6.0, max_relative = 1e-8);
    let empty = tail_sum(&PsiFunction::power(40.0).unwrap(), 1.0, 1u64 << 40).unwrap();
    assert_eq!((empty.value, empty.error_bound), (0.0, 0.0));
}

#[test]
fn tail_sum_against_direct_summation() {
    for (r, s, n) in [
        (0.75, 2.0, 4u64),
        (2.0, 1.0, 7),
        (1.5, 3.0, 2),
        (0.9, 1.5, 10),
    ] {
        let psi = PsiFunction::power(r).unwrap();
        let a = if s == 1.0 { r } else { r * s - s + 2.0 };
        let t = tail_sum(&psi, s, n).unwrap();
        let oracle = zeta_tail(a, n);
        assert!(
            t.lower() <= oracle * (1.0 + 1e-12) && oracle <= t.upper() * (1.0 + 1e-12),
            "r={r} s={s} n={n}"
        );
        assert!(t.error_bound <= 1e-8 * t.value);
    }
}

#[test]
fn tail_sum_log_family_against_long_summation() {
    // slowly decaying summand: compare a long explicit sum plus Simpson remainder
    let psi = log_power();
    let n = 3u64;
    let m = 1_000_000u64;
    let head: f64 = (n..=m).rev().map(|k| psi.value(k as f64).powi(2)).sum();
    let tail = phi_s(&psi, 2.0, m as f64 + 0.5).unwrap();
    let t = tail_sum(&psi, 2.0, n).unwrap();
    assert_relative_eq!(t.value, head + tail, max_relative = 1e-9);
}

fn psi_strategy() -> impl Strategy<Value = PsiFunction> {
    prop_oneof![
        (0.55f64..3.0).prop_map(|r| PsiFunction::power(r).unwrap()),
        (1.5f64..4.0, 0.0f64..1.0).prop_map(|(p, extra)| {
            let gamma = (p - 1.0) / p + 0.05 + extra;
            PsiFunction::log_power_min_shift(p, gamma).unwrap()
        }),
        (1.5f64..3.0, 0.0f64..0.5).prop_map(|(p, extra)| {
            let floor = (p - 1.0) / p;
            PsiFunction::loglog_power_min_shift(p, floor + extra, floor + 0.1 + extra).unwrap()
        }),
    ]
}

/// Exponent `s` for which `Φ_s` converges for this ψ.
fn admissible_s(psi: &PsiFunction, u: f64) -> f64 {
    match psi.family() {
        psi_approx::psi::PsiFamily::Power { r } if r < 1.0 => {
            // s(1 - r) < 1
            let hi = 1.0 / (1.0 - r);
            1.1 + u * (hi.min(6.0) - 1.1) * 0.9
        }
        psi_approx::psi::PsiFamily::Power { .. } => 1.1 + 3.0 * u,
        psi_approx::psi::PsiFamily::LogPower { p, .. }
        | psi_approx::psi::PsiFamily::LogLogPower { p, .. } => p / (p - 1.0),
    }
}

/// A weight exponent `q` keeping `g_q = ψ t^{1/q}` decreasing.
fn decreasing_weight(psi: &PsiFunction, u: f64) -> f64 {
    let floor = match psi.family() {
        psi_approx::psi::PsiFamily::Power { r } => (1.0 / r).max(1.0) * 1.05,
        psi_approx::psi::PsiFamily::LogPower { p, .. }
        | psi_approx::psi::PsiFamily::LogLogPower { p, .. } => p,
    };
    floor * (1.0 + 3.0 * u)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn alpha_is_scale_invariant(psi in psi_strategy(), c in 1e-3f64..1e3, t in 1.0f64..1e8) {
        let scaled = psi.scaled(c).unwrap();
        prop_assert!((alpha(&scaled, t).unwrap() - alpha(&psi, t).unwrap()).abs() <= 1e-12 * alpha(&psi, t).unwrap().max(1.0));
    }

    #[test]
    fn alpha_margins_are_monotone_in_n(psi in psi_strategy(), n in 1u64..200, u in 0.0f64..1.0) {
        let cfg = SearchGrid::default();
        let g = WeightedPsi::new(psi, decreasing_weight(&psi, u)).unwrap();
        let (n0, n1) = (n as f64, (2 * n) as f64);
        prop_assert!(alpha_inf(&g, n1, &cfg) >= alpha_inf(&g, n0, &cfg) * (1.0 - 1e-12));
        prop_assert!(alpha_sup(&g, n1, &cfg) <= alpha_sup(&g, n0, &cfg) * (1.0 + 1e-12));
        let c = classify(&g, &cfg);
        if c.lower_margin.is_finite() && c.upper_margin.is_finite() {
            prop_assert!(c.lower_margin <= c.upper_margin);
        }
        if c.verdict == Membership::MC {
            prop_assert!(c.in_m0());
        }
    }

    #[test]
    fn phi_s_strictly_decreasing(psi in psi_strategy(), u in 0.0f64..1.0, x in 1.0f64..1e6, ratio in 1.01f64..100.0) {
        let s = admissible_s(&psi, u);
        let (a, b) = (phi_s(&psi, s, x).unwrap(), phi_s(&psi, s, x * ratio).unwrap());
        prop_assert!(a > b, "Φ_s({x}) = {a} <= Φ_s({}) = {b}", x * ratio);
    }

    #[test]
    fn phi_s_inverse_round_trip(psi in psi_strategy(), u in 0.0f64..1.0, w in 0.0f64..1.0) {
        let s = admissible_s(&psi, u);
        let top = phi_s(&psi, s, 1.0).unwrap();
        let bottom = phi_s(&psi, s, 1e150).unwrap().max(1e-250);
        let y = (top.ln() + w * (bottom.ln() - top.ln())).exp();
        let x = phi_s_inverse(&psi, s, y).unwrap();
        prop_assert!((phi_s(&psi, s, x).unwrap() - y).abs() <= 1e-8 * y);
    }

    #[test]
    fn tail_sum_lies_in_integral_bracket(psi in psi_strategy(), u in 0.0f64..1.0, n in 1u64..500) {
        let s = admissible_s(&psi, u);
        let t = tail_sum(&psi, s, n).unwrap();
        let nf = n as f64;
        let phi = phi_s(&psi, s, nf).unwrap();
        let first = psi.value(nf).powf(s) * nf.powf(s - 2.0);
        prop_assert!(phi <= t.upper() * (1.0 + 1e-10));
        prop_assert!(t.lower() <= (first + phi) * (1.0 + 1e-10));
    }

    #[test]
    fn lemma_one_inequality(psi in psi_strategy(), u in 0.0f64..1.0, n in 1u64..=64) {
        let s = admissible_s(&psi, u);
        let g = WeightedPsi::new(psi, s / (s - 1.0)).unwrap();
        let cfg = SearchGrid::default();
        let a = alpha_inf(&g, n as f64, &cfg);
        prop_assume!(a > 0.0 && check_shape(&g, &cfg));
        let nf = n as f64;
        let lhs = psi.value(nf).powf(s) * nf.powf(s - 1.0);
        let rhs = s / a * tail_sum(&psi, s, n).unwrap().value;
        prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
    }
}

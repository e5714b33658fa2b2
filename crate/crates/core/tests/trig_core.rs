//! Trigonometric polynomials: evaluation, norms, partial sums, Vallée-Poussin
//! kernels and the (ψ,β) multipliers.

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use psi_approx::psi::PsiFunction;
use psi_approx::trig::{
    convolve_kernel, lp_norm, partial_sum_order, partial_sum_set, psi_beta_derivative,
    psi_beta_integral, psi_kernel_poly, sup_norm, vallee_poussin, FrequencySet, GridSpec, TrigPoly,
};
use psi_approx::Error;

/// `Σ f̂(k) e^{ikt}` term by term with fresh exponentials (oracle).
fn direct(f: &TrigPoly, t: f64) -> Complex64 {
    f.iter()
        .map(|(k, c)| c * Complex64::new((k as f64 * t).cos(), (k as f64 * t).sin()))
        .sum()
}

#[test]
fn evaluation_examples() {
    let c = TrigPoly::cosine(1, 1.0);
    assert_eq!(c.evaluate(0.0).unwrap(), 1.0);
    assert!(c.evaluate(FRAC_PI_2).unwrap().abs() < 1e-16);
    let f = TrigPoly::from_positive([
        (0, Complex64::new(2.0, 0.0)),
        (2, Complex64::from_polar(0.5, -FRAC_PI_4)),
    ]);
    assert_relative_eq!(
        f.evaluate(0.0).unwrap(),
        2.0 + FRAC_PI_4.cos(),
        max_relative = 1e-15
    );
    for t in [0.1, 1.3, 4.0] {
        assert_relative_eq!(
            f.evaluate(t).unwrap(),
            2.0 + (2.0 * t - FRAC_PI_4).cos(),
            max_relative = 1e-14
        );
    }
    let complex = TrigPoly::from_coeffs([(1, Complex64::new(0.5, 0.0))]);
    assert!(matches!(complex.evaluate(1.0), Err(Error::Symmetry { .. })));
}

#[test]
fn norm_examples() {
    let g = GridSpec::default();
    let c = TrigPoly::cosine(1, 1.0);
    assert_relative_eq!(
        lp_norm(&c, 2.0, &g).unwrap(),
        PI.sqrt(),
        max_relative = 1e-14
    );
    assert_relative_eq!(lp_norm(&c, 1.0, &g).unwrap(), 4.0, max_relative = 1e-6);
    let one = TrigPoly::constant(1.0);
    for p in [1.0, 1.5, 2.0, 3.0] {
        assert_relative_eq!(
            lp_norm(&one, p, &g).unwrap(),
            (2.0 * PI).powf(1.0 / p),
            max_relative = 1e-13
        );
    }
    // ∫|cos t|³ = 8/3
    assert_relative_eq!(
        lp_norm(&c, 3.0, &g).unwrap(),
        (8.0f64 / 3.0).cbrt(),
        max_relative = 1e-6
    );
    assert!(matches!(
        lp_norm(&TrigPoly::cosine(1000, 1.0), 2.0, &GridSpec::new(1024, 0)),
        Err(Error::Grid { .. })
    ));
}

#[test]
fn sup_norm_examples() {
    let g = GridSpec::default();
    let s = sup_norm(&TrigPoly::cosine(1, 1.0), &g).unwrap();
    assert_eq!(s.value, 1.0);
    assert!(s.gap <= 1e-3);
    let two = TrigPoly::cosine(1, 1.0).add(&TrigPoly::cosine(2, 1.0));
    assert_relative_eq!(sup_norm(&two, &g).unwrap().value, 2.0, max_relative = 1e-15);
    let v2 = vallee_poussin(2).unwrap();
    assert_relative_eq!(v2.evaluate(0.0).unwrap(), 3.0, max_relative = 1e-15);
    assert_relative_eq!(sup_norm(&v2, &g).unwrap().value, 3.0, max_relative = 1e-15);
}

#[test]
fn sup_norm_interval_contains_dense_maximum() {
    // off-grid peaks: dense oracle scan at 2^20 points
    let f = TrigPoly::from_positive((1..=9).map(|k| {
        (
            k,
            Complex64::from_polar(1.0 / k as f64, 0.37 * k as f64 * k as f64),
        )
    }));
    let dense = (0..1 << 20)
        .map(|j| direct(&f, 2.0 * PI * j as f64 / (1 << 20) as f64).norm())
        .fold(0.0, f64::max);
    let s = sup_norm(&f, &GridSpec::new(64, 60)).unwrap();
    assert!(s.value <= dense * (1.0 + 1e-12) + 1e-12);
    assert!(s.upper() >= dense * (1.0 - 1e-12));
    assert!(dense - s.value < 1e-9);
}

#[test]
fn partial_sum_examples() {
    let f = TrigPoly::cosine(1, 1.0).add(&TrigPoly::cosine(5, 1.0));
    assert_eq!(partial_sum_order(&f, 2), TrigPoly::cosine(1, 1.0));
    assert_eq!(partial_sum_order(&f, 6), f);
    assert!(partial_sum_order(&TrigPoly::cosine(3, 1.0), 2).is_empty());
    let c = TrigPoly::cosine(1, 1.0);
    let half = partial_sum_set(&c, &FrequencySet::new([1]));
    assert_eq!(half, TrigPoly::from_coeffs([(1, Complex64::new(0.5, 0.0))]));
    assert_eq!(
        c.sub(&half),
        TrigPoly::from_coeffs([(-1, Complex64::new(0.5, 0.0))])
    );
    assert_eq!(partial_sum_set(&c, &FrequencySet::new([1, -1])), c);
    assert!(partial_sum_set(&f, &FrequencySet::empty()).is_empty());
}

#[test]
fn vallee_poussin_examples() {
    let v1 = vallee_poussin(1).unwrap();
    assert_eq!(v1.support(), vec![-1, 0, 1]);
    for k in -1..=1 {
        assert_eq!(v1.coeff(k), Complex64::new(0.5, 0.0));
    }
    let v2 = vallee_poussin(2).unwrap();
    assert_eq!(v2.coeff(3), Complex64::new(0.25, 0.0));
    assert_eq!(v2.coeff(-3), Complex64::new(0.25, 0.0));
    assert_eq!(v2.support_bound(), 3);
    assert!(vallee_poussin(0).is_err());
}

#[test]
fn vallee_poussin_against_cosine_form() {
    // V_m(t) = 1/2 + Σ_{k<=m} cos kt + Σ_{m<k<2m} 2(1 - k/(2m)) cos kt
    for m in [1u64, 3, 7] {
        let v = vallee_poussin(m).unwrap();
        for t in [0.0, 0.4, 2.2, 5.9] {
            let mut oracle = 0.5;
            for k in 1..2 * m {
                let w = if k <= m {
                    1.0
                } else {
                    2.0 * (1.0 - k as f64 / (2 * m) as f64)
                };
                oracle += w * (k as f64 * t).cos();
            }
            assert!((v.evaluate(t).unwrap() - oracle).abs() < 1e-13);
        }
    }
}

#[test]
fn vallee_poussin_l1_norms_against_fine_quadrature() {
    // ‖V_m‖₁ ≤ 3π, with an independent midpoint rule on 2^18 points
    for m in [1u64, 2, 5, 16, 64] {
        let v = vallee_poussin(m).unwrap();
        let n = 1usize << 18;
        let h = 2.0 * PI / n as f64;
        let oracle: f64 = (0..n)
            .map(|j| direct(&v, (j as f64 + 0.5) * h).re.abs())
            .sum::<f64>()
            * h;
        let ours = lp_norm(&v, 1.0, &GridSpec::new(8192, 0)).unwrap();
        assert_relative_eq!(ours, oracle, max_relative = 1e-4);
        assert!(ours <= 3.0 * PI + 1e-6);
    }
}

#[test]
fn derivative_and_integral_examples() {
    let c = TrigPoly::cosine(1, 1.0);
    let one = PsiFunction::power(1.0).unwrap();
    assert_eq!(psi_beta_derivative(&c, &one, 0.0), c);
    let rotated = psi_beta_derivative(&c, &one, 1.0);
    assert!((rotated.coeff(1) - Complex64::new(0.0, 0.5)).norm() < 1e-16);
    // e^{i(t + π/2)}/2 + c.c. = -sin t
    for t in [0.3, 1.1] {
        assert!((rotated.evaluate(t).unwrap() + t.sin()).abs() < 1e-15);
    }
    assert!(psi_beta_derivative(&TrigPoly::constant(3.0), &one, 0.7).is_empty());
    let weyl = PsiFunction::power(2.0).unwrap();
    assert_eq!(psi_beta_integral(&c, &weyl, 0.0), c);
    let c2 = psi_beta_integral(&TrigPoly::cosine(2, 1.0), &weyl, 0.0);
    assert!((c2.coeff(2) - Complex64::new(0.125, 0.0)).norm() < 1e-17);
}

#[test]
fn kernel_convolution_reproduces_integral() {
    let weyl = PsiFunction::power(2.0).unwrap();
    let k = psi_kernel_poly(&weyl, 0.0, 2).unwrap();
    assert_eq!(k.poly.coeff(1), Complex64::new(0.5, 0.0));
    assert_eq!(k.poly.coeff(2), Complex64::new(0.125, 0.0));
    assert!(k.truncation_residue.is_some());
    let phi = TrigPoly::cosine(1, 1.0);
    assert_eq!(
        convolve_kernel(&k.poly, &phi),
        psi_beta_integral(&phi, &weyl, 0.0)
    );
    let rotated = psi_kernel_poly(&weyl, 1.0, 1).unwrap();
    assert!((rotated.poly.coeff(1) - Complex64::new(0.0, -0.5)).norm() < 1e-16);
    assert!(psi_kernel_poly(&PsiFunction::power(0.75).unwrap(), 0.0, 4)
        .unwrap()
        .truncation_residue
        .is_none());
}

#[test]
fn json_round_trip() {
    let f = TrigPoly::from_positive([
        (0, Complex64::new(1.5, 0.0)),
        (3, Complex64::new(0.25, -0.5)),
    ]);
    let text = serde_json::to_string(&f).unwrap();
    assert!(text.starts_with(r#"{"coeffs":[[-3,"#));
    assert_eq!(serde_json::from_str::<TrigPoly>(&text).unwrap(), f);
}

fn real_poly(max_k: i64, mean_zero: bool) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec((1..=max_k, -1.0f64..1.0, -1.0f64..1.0), 1..12).prop_flat_map(
        move |terms| {
            (Just(terms), -1.0f64..1.0).prop_map(move |(terms, a0)| {
                let mut f = TrigPoly::from_positive(
                    terms.iter().map(|&(k, re, im)| (k, Complex64::new(re, im))),
                );
                if !mean_zero {
                    f = f.add(&TrigPoly::constant(a0));
                }
                f
            })
        },
    )
}

fn psi_strategy() -> impl Strategy<Value = PsiFunction> {
    prop_oneof![
        (0.3f64..3.0).prop_map(|r| PsiFunction::power(r).unwrap()),
        (1.5f64..3.0).prop_map(|p| PsiFunction::log_power_min_shift(p, 1.0).unwrap()),
        Just(PsiFunction::loglog_power_min_shift(2.0, 0.5, 1.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_agreement(f in real_poly(64, false)) {
        let g = GridSpec::default();
        let quad = lp_norm(&f, 2.0, &g).unwrap();
        let parseval = 2.0 * PI * f.energy();
        prop_assert!((quad * quad - parseval).abs() <= 1e-9 * quad * quad);
    }

    #[test]
    fn scaled_means_nondecreasing_in_p(f in real_poly(40, false)) {
        let g = GridSpec::default();
        let mean = |p: f64| lp_norm(&f, p, &g).unwrap() / (2.0 * PI).powf(1.0 / p);
        let (m1, m2, m4) = (mean(1.0), mean(2.0), mean(4.0));
        prop_assert!(m1 <= m2 * (1.0 + 1e-12));
        prop_assert!(m2 <= m4 * (1.0 + 1e-12));
        prop_assert!(m4 <= sup_norm(&f, &g).unwrap().upper() * (1.0 + 1e-12));
    }

    #[test]
    fn evaluation_matches_direct_sum(f in real_poly(64, false), t in 0.0f64..(2.0 * PI)) {
        let ours = f.evaluate(t).unwrap();
        prop_assert!((ours - direct(&f, t).re).abs() <= 1e-13 * f.l1_coeff_mass().max(1.0));
    }

    #[test]
    fn partial_sums_are_additive(f in real_poly(20, false), split in prop::collection::vec(any::<bool>(), 41)) {
        let (a, b): (Vec<i64>, Vec<i64>) = (-20i64..=20).partition(|&k| split[(k + 20) as usize]);
        let (ga, gb) = (FrequencySet::new(a), FrequencySet::new(b));
        prop_assert!(ga.is_disjoint(&gb));
        let joint = partial_sum_set(&f, &ga.union(&gb));
        let sum = partial_sum_set(&f, &ga).add(&partial_sum_set(&f, &gb));
        prop_assert_eq!(joint, sum);
    }

    #[test]
    fn derivative_inverts_integral(f in real_poly(64, true), psi in psi_strategy(), beta in -4.0f64..4.0) {
        let back = psi_beta_derivative(&psi_beta_integral(&f, &psi, beta), &psi, beta);
        for (k, c) in f.iter() {
            prop_assert!((back.coeff(k) - c).norm() <= 1e-13 * c.norm());
        }
        prop_assert_eq!(back.len(), f.len());
        prop_assert!(back.is_real(1e-13));
    }

    #[test]
    fn vallee_poussin_band_is_exactly_half(m in 1u64..=64) {
        let v = vallee_poussin(m).unwrap();
        for k in -(m as i64)..=(m as i64) {
            prop_assert_eq!(v.coeff(k), Complex64::new(0.5, 0.0));
        }
        prop_assert!(lp_norm(&v, 1.0, &GridSpec::new(8192, 0)).unwrap() <= 3.0 * PI + 1e-6);
    }
}

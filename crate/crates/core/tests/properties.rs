//! Invariants checked on random inputs.

use bbsolve_core::arith::bigfloat::{Complex, Real};
use bbsolve_core::arith::{rat, FracElem, Poly, Rat, SymbolKind, Symbols};
use bbsolve_core::curve::genus::genus;
use bbsolve_core::ode::{parse_params, parse_poly, u_var, AutonomousODE};
use bbsolve_core::pipeline::{analyze, solve, SolveOptions};
use bbsolve_core::subeq::{has_briot_bouquet_shape, homography};
use bbsolve_core::verify::wp_eval;
use proptest::prelude::*;

const PREC: usize = 256;
const COTH_TOLERANCE: f64 = 1e-12;

fn kdv_curve(a: i64, u4: i64, u6: i64) -> (Poly<FracElem>, Symbols) {
    let syms = parse_params("").unwrap();
    let text = format!("u1^2 - (2/{a})*u0^3 + 20*({u4})*u0 + 56*({a})*({u6})");
    (parse_poly(&text, &syms, &u_var).unwrap(), syms)
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn invertible() -> impl Strategy<Value = [Rat; 4]> {
    (small_rat(), small_rat(), small_rat(), small_rat())
        .prop_filter("singular map", |(a, b, c, d)| a * d != b * c)
        .prop_map(|(a, b, c, d)| [a, b, c, d])
}

/// `-d + (3d/2) coth^2(sqrt(3d/2) xi)`, the one-period limit with
/// `g2 = 3 d^2`, `g3 = -d^3` (double root `d/2`).
fn coth_limit(d: &Rat, xi: &Complex) -> Complex {
    let s = Real::from_rat(&(d * rat(3, 2)), PREC);
    let t = xi.scale(&s.sqrt()).tanh();
    t.mul(&t).inv().scale(&s).sub(&Complex::from_rat(d, PREC))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn homography_preserves_briot_bouquet_shape(map in invertible()) {
        let mut syms = parse_params("a != 0").unwrap();
        syms.add("U4", SymbolKind::Resonance, false);
        syms.add("U6", SymbolKind::Resonance, false);
        let f = parse_poly("u1^2 - 2/a*u0^3 + 20*U4*u0 + 56*a*U6", &syms, &u_var).unwrap();
        let [a, b, c, d] = &map;
        prop_assert!(has_briot_bouquet_shape(&homography(&f, 2, [a, b, c, d]), 2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn genus_is_a_homography_invariant(map in invertible(), u4 in 1i64..5, u6 in 1i64..5) {
        let (f, syms) = kdv_curve(1, u4, u6);
        let before = genus(&f, &syms, 3).unwrap().genus;
        let [a, b, c, d] = &map;
        let after = genus(&homography(&f, 2, [a, b, c, d]), &syms, 3).unwrap().genus;
        prop_assert_eq!(before, 1);
        prop_assert_eq!(after, before);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn wp_matches_coth_degeneracy(dn in 1i64..8, dd in 1i64..4, re in 0.05f64..1.2, im in -0.3f64..0.3) {
        let d = rat(dn, dd);
        let g2 = Complex::from_rat(&(&d * &d * rat(3, 1)), PREC);
        let g3 = Complex::from_rat(&(-(&d * &d * &d)), PREC);
        let xi = Complex::from_f64(re, im, PREC);
        let (w, _) = wp_eval(&g2, &g3, &xi).unwrap();
        let expect = coth_limit(&d, &xi);
        let err = (w.to_c64() - expect.to_c64()).norm() / expect.to_c64().norm().max(1.0);
        prop_assert!(err < COTH_TOLERANCE, "relative error {err:e}");
    }
}

#[test]
fn laurent_coefficients_are_stable_under_extension() {
    for (text, params) in [("u3 - (6/a)*u0*u1", "a != 0"), ("nu*u3 + b*u2 + mu*u1 + (1/2)*u0^2 + A", "nu != 0, b, mu, A")] {
        let ode = AutonomousODE::parse(text, params).unwrap();
        let short = analyze(&ode, 10, 1).unwrap();
        for j in [14, 18] {
            let long = analyze(&ode, j, 1).unwrap();
            for (s, l) in short.families.iter().zip(&long.families) {
                assert_eq!(s.series.coeffs[..], l.series.coeffs[..=10], "{text}");
            }
        }
    }
}

#[test]
fn branch_set_is_stable_as_the_truncation_grows() {
    let ode = AutonomousODE::parse("u3 - (6/a)*u0*u1", "a != 0").unwrap();
    let base = solve(&ode, &SolveOptions::default()).unwrap();
    assert!(base.rank_checks.windows(2).all(|w| w[0].1 == w[1].1), "{:?}", base.rank_checks);
    for extra in [4, 8] {
        let rep = solve(&ode, &SolveOptions { terms: Some(base.terms + extra), ..Default::default() }).unwrap();
        let subeqs = |r: &bbsolve_core::pipeline::SolveReport| r.branches.iter().map(|b| b.branch.subeq.clone()).collect::<Vec<_>>();
        assert_eq!(subeqs(&rep), subeqs(&base));
    }
}

#[test]
fn ks_solutions_are_stable_as_the_truncation_grows() {
    let ode = AutonomousODE::parse("nu*u3 + b*u2 + mu*u1 + (1/2)*u0^2 + A", "nu != 0, b, mu, A").unwrap();
    let base = solve(&ode, &SolveOptions::default()).unwrap();
    assert_eq!(base.rank_checks.len(), 3);
    assert!(base.rank_checks.windows(2).all(|w| w[0].1 == w[1].1), "{:?}", base.rank_checks);
    let longer = solve(&ode, &SolveOptions { terms: Some(base.terms + 4), ..Default::default() }).unwrap();
    let constraints = |r: &bbsolve_core::pipeline::SolveReport| {
        let mut c: Vec<_> = r.branches.iter().map(|b| b.branch.constraints.clone()).collect();
        c.sort_by_key(|x| format!("{x:?}"));
        c
    };
    assert_eq!(constraints(&longer), constraints(&base));
}

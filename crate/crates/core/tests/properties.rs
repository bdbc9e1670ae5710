mod common;

use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;
use theta_torus::nctorus::{gauss, Mode, NcPoly, PhaseScalar, RatFunc};
use theta_torus::projector::{phi_bounds, projection_series_with, symbol_a, CoefficientQuadrature};
use theta_torus::repmat::{build_rep, harper_matrix, harper_norm, hermitian_eigenvalues, represent};
use theta_torus::theta::{eval_theta, eval_theta_char, eval_theta_parity, Characteristics, Parity, UpperHalfPoint};

fn tau_strategy() -> impl Strategy<Value = UpperHalfPoint> {
    (-1.0f64..1.0, 0.3f64..3.0).prop_map(|(re, im)| UpperHalfPoint::new(re, im).unwrap())
}

fn z_strategy() -> impl Strategy<Value = num_complex::Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
}

type Terms = Vec<((i64, i64), (i64, i64, i64))>;

fn terms_strategy() -> impl Strategy<Value = Terms> {
    prop::collection::vec(((-2i64..=2, -2i64..=2), (-3i64..=3, -3i64..=3, -2i64..=2)), 0..4)
}

fn exact_poly(terms: &Terms) -> NcPoly {
    let items = terms.iter().map(|&(k, (re, im, p))| (k, PhaseScalar::Exact(RatFunc::s_pow(p).mul(&RatFunc::constant(gauss(re, im))))));
    NcPoly::from_terms(Mode::Exact, items).unwrap()
}

fn float_poly(alpha: f64, terms: &Terms) -> NcPoly {
    let items = terms.iter().map(|&(k, (re, im, p))| (k, PhaseScalar::Float(c(re as f64, im as f64) * cis(PI * alpha * p as f64))));
    NcPoly::from_terms(Mode::float(alpha), items).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tail_bound_is_sound(z in z_strategy(), tau in tau_strategy(), exp in 4i32..13) {
        let tol = 10f64.powi(-exp);
        let got = eval_theta(z, tau, tol).unwrap();
        let want = theta_direct(0.0, 0.0, z, tau.to_complex(), 80, None);
        prop_assert!(got.tail_bound <= tol);
        prop_assert!((got.value - want).norm() <= got.error_bound() + 1e-13 * want.norm().max(1.0));
    }

    #[test]
    fn theta_is_quasi_periodic(z in z_strategy(), tau in tau_strategy()) {
        let t = tau.to_complex();
        let i = c(0.0, 1.0);
        let base = eval_theta(z, tau, 1e-15).unwrap().value;
        let shifted = eval_theta(z + 1.0, tau, 1e-15).unwrap().value;
        prop_assert!((base - shifted).norm() <= 1e-12 * base.norm().max(1.0));
        let lhs = eval_theta(z + t, tau, 1e-15).unwrap().value;
        let rhs = (-i * PI * t - 2.0 * i * PI * z).exp() * base;
        prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1.0));
    }

    #[test]
    fn parity_parts_add_up(z in z_strategy(), tau in tau_strategy(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let ch = Characteristics::new(a, b);
        let full = eval_theta_char(ch, z, tau, 1e-15).unwrap().value;
        let odd = eval_theta_parity(Parity::Odd, ch, z, tau, 1e-15).unwrap().value;
        let even = eval_theta_parity(Parity::Even, ch, z, tau, 1e-15).unwrap().value;
        prop_assert!((odd + even - full).norm() <= 1e-12 * full.norm().max(1.0));
        let plain_odd = eval_theta_parity(Parity::Odd, Characteristics::ZERO, z, tau, 1e-15).unwrap().value;
        let four_tau = UpperHalfPoint::new(4.0 * tau.re(), 4.0 * tau.im()).unwrap();
        let doubled = eval_theta(2.0 * z, four_tau, 1e-15).unwrap().value;
        let plain = eval_theta(z, tau, 1e-15).unwrap().value;
        prop_assert!((plain_odd - (plain - doubled)).norm() <= 1e-12 * plain.norm().max(1.0));
    }

    #[test]
    fn characteristics_reduce_to_plain_theta(z in z_strategy(), tau in tau_strategy(), a in -0.5f64..0.5, b in -1.0f64..1.0) {
        let t = tau.to_complex();
        let i = c(0.0, 1.0);
        let lhs = eval_theta_char(Characteristics::new(a, b), z, tau, 1e-15).unwrap().value;
        let rhs = (i * PI * a * a * t + 2.0 * i * PI * a * (z + b)).exp() * eval_theta(z + a * t + b, tau, 1e-15).unwrap().value;
        prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1.0));
    }

    #[test]
    fn exact_ring_axioms(x in terms_strategy(), y in terms_strategy(), w in terms_strategy()) {
        let (x, y, w) = (exact_poly(&x), exact_poly(&y), exact_poly(&w));
        let xy_w = x.mul(&y).unwrap().mul(&w).unwrap();
        let x_yw = x.mul(&y.mul(&w).unwrap()).unwrap();
        prop_assert_eq!(xy_w, x_yw);
        let left = x.mul(&y.add(&w).unwrap()).unwrap();
        let right = x.mul(&y).unwrap().add(&x.mul(&w).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(x.mul(&NcPoly::unit(Mode::Exact)).unwrap(), x.clone());
    }

    #[test]
    fn adjoint_reverses_products(x in terms_strategy(), y in terms_strategy()) {
        let (x, y) = (exact_poly(&x), exact_poly(&y));
        prop_assert_eq!(x.mul(&y).unwrap().adjoint(), y.adjoint().mul(&x.adjoint()).unwrap());
        prop_assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn trace_is_tracial(x in terms_strategy(), y in terms_strategy()) {
        let (x, y) = (exact_poly(&x), exact_poly(&y));
        prop_assert_eq!(x.mul(&y).unwrap().trace(), y.mul(&x).unwrap().trace());
    }

    #[test]
    fn fourier_automorphism_has_order_four(x in terms_strategy(), y in terms_strategy()) {
        let (x, y) = (exact_poly(&x), exact_poly(&y));
        prop_assert_eq!(x.sigma().sigma().sigma().sigma(), x.clone());
        prop_assert_eq!(x.mul(&y).unwrap().sigma(), x.sigma().mul(&y.sigma()).unwrap());
        prop_assert_eq!(x.adjoint().sigma(), x.sigma().adjoint());
    }

    #[test]
    fn expectation_is_a_projection(x in terms_strategy()) {
        let x = exact_poly(&x);
        let e = x.expectation();
        prop_assert_eq!(e.expectation(), e.clone());
        prop_assert_eq!(e.sigma(), e);
    }

    #[test]
    fn representation_is_a_homomorphism(x in terms_strategy(), y in terms_strategy(), q in 2i64..7, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let alpha = 1.0 / q as f64;
        let (x, y) = (float_poly(alpha, &x), float_poly(alpha, &y));
        let rep = build_rep(1, q, t1, t2).unwrap();
        let lhs = represent(&x.mul(&y).unwrap(), &rep).unwrap();
        let rhs = represent(&x, &rep).unwrap() * represent(&y, &rep).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-9);
        let adj = represent(&x.adjoint(), &rep).unwrap();
        prop_assert!(max_diff(&adj, &represent(&x, &rep).unwrap().adjoint()) < 1e-12);
    }

    #[test]
    fn twists_shift_representations(x in terms_strategy(), q in 2i64..7, t in (0.0f64..1.0, 0.0f64..1.0), s in (-1.0f64..1.0, -1.0f64..1.0)) {
        let x = float_poly(1.0 / q as f64, &x);
        let rep = build_rep(1, q, t.0, t.1).unwrap();
        let lhs = represent(&x.twist(s.0, s.1).unwrap(), &rep).unwrap();
        let rhs = represent(&x, &rep.shifted(s.0, s.1)).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn harper_eigenvalues_are_bounded(p in 1i64..6, q in 2i64..12, lambda in 0.0f64..4.0, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        prop_assume!(num_integer::gcd(p, q) == 1);
        let rep = build_rep(p, q, t1, t2).unwrap();
        for ev in hermitian_eigenvalues(&harper_matrix(&rep, lambda)) {
            prop_assert!(ev.abs() <= 2.0 + lambda + 1e-12);
        }
    }

    #[test]
    fn coefficients_are_sigma_symmetric(q in 2i64..5, n1 in -4i64..=4, n2 in -4i64..=4) {
        let quad = CoefficientQuadrature::new(q, 64).unwrap();
        let a = quad.coefficient(n1, n2).unwrap();
        let b = quad.coefficient(-n2, n1).unwrap();
        prop_assert!((b - cis(-2.0 * PI * (n1 * n2) as f64 / q as f64) * a).norm() < 1e-12);
    }
}

#[test]
fn symbol_is_positive_on_fine_grids() {
    let g = 128;
    for q in 2..=12 {
        let mut min = f64::INFINITY;
        for i in 0..g {
            for j in 0..g {
                let v = symbol_a(q, i as f64 / g as f64, j as f64 / g as f64).unwrap();
                assert!(v.im.abs() < 1e-12);
                min = min.min(v.re);
            }
        }
        assert!(min > 0.0, "q={q} min={min}");
    }
}

#[test]
fn phi_is_a_lower_bound_for_the_norm() {
    for q in 2..=13 {
        let phi = phi_bounds(q).unwrap().value;
        let norm = harper_norm(1, q, 2.0).unwrap();
        assert!(phi <= norm + 1e-6, "q={q}: phi={phi} norm={norm}");
    }
}

#[test]
fn truncated_series_is_sigma_invariant_and_self_adjoint() {
    let series = projection_series_with(2, 8, 64).unwrap();
    let tol = series.tail_mass.max(1e-12);
    assert!(series.poly.sigma().max_abs_diff(&series.poly).unwrap() <= tol);
    assert!(series.poly.adjoint().max_abs_diff(&series.poly).unwrap() <= tol);
}

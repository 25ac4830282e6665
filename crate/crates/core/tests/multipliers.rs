use std::f64::consts::PI;

use anisohilbert::curves::{make_two_sided, ConvexProfile, Curve};
use anisohilbert::geometry::DilationGroup;
use anisohilbert::multipliers::*;
use anisohilbert::pv_quadrature::{pv_integrate, PVSpec, PhaseIntegrand};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SQUARE: ConvexProfile = ConvexProfile::Pow { exponent: 2.0 };

fn z4(re: f64, im: f64) -> AnalyticParameter {
    AnalyticParameter::section4(re, im).unwrap()
}

fn signed_log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    s * 10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
}

/// Folded trapezoid for p.v.∫ e^{-2πi(ξt+ηγ)}[1+η²γ²]^z dt/t on [0, R].
fn trapezoid_m(xi: f64, eta: f64, z: Complex64, r: f64, n: usize) -> Complex64 {
    let g = |t: f64| {
        let gam = SQUARE.value(t);
        let w = (z * (1.0 + eta * eta * gam * gam).ln()).exp();
        w * Complex64::from_polar(1.0, -2.0 * PI * (xi * t + eta * gam))
    };
    let h = r / n as f64;
    // (g(t) − g(−t))/t → 2g'(0) = −4πiξ at t = 0.
    let mut sum = Complex64::new(0.0, -4.0 * PI * xi) * 0.5;
    for k in 1..=n {
        let t = k as f64 * h;
        let f = (g(t) - g(-t)) / t;
        sum += if k == n { f * 0.5 } else { f };
    }
    sum * h
}

#[test]
fn straight_line_reduces_to_sign_multiplier() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let th: f64 = rng.gen_range(0.0..2.0 * PI);
    let e = vec![th.cos(), th.sin()];
    let f = vec![-e[0], -e[1]];
    let line = make_two_sided(DilationGroup::isotropic(2), e.clone(), f).unwrap().curve;
    let z = AnalyticParameter::unrestricted(0.0, 0.0);
    let spec = PVSpec::default().with_cutoffs(1e-8, 1e8).with_tolerance(1e-10);
    for _ in 0..100 {
        let xi = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
        let a: f64 = xi[0] * e[0] + xi[1] * e[1];
        let m = m_z_homogeneous(&line, &z, &xi, &spec).unwrap();
        let exact = Complex64::new(0.0, -PI * a.signum());
        assert!((m - exact).norm() < 1e-3, "ξ={xi:?}: {m}");
    }
}

#[test]
fn homogeneous_multiplier_vanishes_at_origin_and_conjugates() {
    let curve = Curve::homogeneous(DilationGroup::new(vec![1.0, 3.0]).unwrap());
    let z = AnalyticParameter::new(-0.5, 0.0, Regime::Section2 { beta: 0.9, eta: 0.1 }).unwrap();
    let spec = default_curve_spec(&z).unwrap().with_tolerance(1e-10);
    assert!(m_z_homogeneous(&curve, &z, &[0.0, 0.0], &spec).unwrap().norm() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let xi = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let a = m_z_homogeneous(&curve, &z, &xi, &spec).unwrap();
        let b = m_z_homogeneous(&curve, &z, &[-xi[0], -xi[1]], &spec).unwrap();
        assert!((a - b.conj()).norm() < 2e-8 * (1.0 + a.norm()), "{a} vs {b}");
    }
}

#[test]
fn homogeneous_rejects_convex_curves_and_section4() {
    let z = AnalyticParameter::unrestricted(-0.5, 0.0);
    let spec = default_curve_spec(&z).unwrap();
    let convex = Curve::ConvexPlane { gamma: SQUARE };
    assert!(m_z_homogeneous(&convex, &z, &[1.0, 1.0], &spec).is_err());
    let parabola = Curve::model_parabola();
    assert!(m_z_homogeneous(&parabola, &z4(-1.5, 0.0), &[1.0, 1.0], &spec).is_err());
    assert!(m_z_homogeneous(&parabola, &z, &[1.0], &spec).is_err());
}

#[test]
fn convex_multiplier_is_bounded_on_square_grid() {
    let z = z4(-1.5, 0.0);
    let n = 32;
    let coord = |k: usize| -8.0 + 16.0 * k as f64 / (n - 1) as f64;
    let mut sup: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            sup = sup.max(m_z_convex(&SQUARE, &z, coord(i), coord(j), 1e-9).unwrap().norm());
        }
    }
    assert!(sup <= M_ENVELOPE, "sup |m| = {sup}");
    for &(i, j) in &[(0, 31), (10, 20), (16, 16), (29, 3)] {
        let (xi, eta) = (coord(i), coord(j));
        let r = (1e3 / eta.abs()).sqrt();
        let oracle = trapezoid_m(xi, eta, z.z(), r, 1_000_000);
        let m = m_z_convex(&SQUARE, &z, xi, eta, 1e-11).unwrap();
        assert!((m - oracle).norm() < 1e-6, "({xi},{eta}): {m} vs {oracle}");
    }
}

#[test]
fn magnitude_is_not_monotone_in_re_z() {
    // The weight decreases pointwise in |Re z| but |m| need not: a verified
    // counterexample at (ξ, η) = (−2, 1).
    let (xi, eta) = (-2.0, 1.0);
    let lo = m_z_convex(&SQUARE, &z4(-1.05, 0.0), xi, eta, 1e-11).unwrap().norm();
    let hi = m_z_convex(&SQUARE, &z4(-3.8, 0.0), xi, eta, 1e-11).unwrap().norm();
    let lo_oracle = trapezoid_m(xi, eta, Complex64::new(-1.05, 0.0), 40.0, 1_000_000).norm();
    let hi_oracle = trapezoid_m(xi, eta, Complex64::new(-3.8, 0.0), 40.0, 1_000_000).norm();
    assert!((lo - lo_oracle).abs() < 1e-6 && (hi - hi_oracle).abs() < 1e-6);
    assert!(hi > lo + 0.3, "{lo} {hi}");
}

#[test]
fn derivatives_match_finite_differences() {
    let z = z4(-1.5, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 10 {
        let xi = signed_log_uniform(&mut rng, 1e-2, 1e2);
        let eta = signed_log_uniform(&mut rng, 1e-2, 1e2);
        if (xi / (2.0 * eta)).abs() > 8.0 {
            continue;
        }
        let c = finite_difference_check(&SQUARE, &z, xi, eta, 1e-3, 1e-12, 1e-13).unwrap();
        for (k, e) in c.relative_error.iter().enumerate() {
            assert!(*e < 1e-3, "({xi},{eta}) quantity {k}: {:?}", c);
        }
        checked += 1;
    }
}

/// ξη∂²m by differentiating under the integral, absolutely convergent for Re z < −1/2.
fn mixed_direct(xi: f64, eta: f64, z: Complex64) -> Complex64 {
    let amp = move |t: f64| {
        let g = SQUARE.value(t);
        let w = 1.0 + eta * eta * g * g;
        let wz = (z * w.ln()).exp();
        t * (-4.0 * PI * PI * g * wz - 4.0 * PI * Complex64::i() * z * eta * g * g * wz / w)
    };
    let integrand = PhaseIntegrand {
        amplitude: amp,
        phase: move |t: f64| 2.0 * PI * (xi * t + eta * SQUARE.value(t)),
        phase_derivative: move |t: f64| 2.0 * PI * (xi + eta * SQUARE.d1(t)),
    };
    let r = convex_cutoff(&SQUARE, z.re, eta, 1e8);
    let spec = PVSpec::default().with_cutoffs(1e-14, r).with_tolerance(1e-12);
    xi * eta * pv_integrate(&integrand, &spec).unwrap().scalar()
}

#[test]
fn mixed_derivative_matches_direct_differentiation() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for im in [0.0, 5.0] {
        let z = z4(-1.5, im);
        for _ in 0..10 {
            let xi = signed_log_uniform(&mut rng, 1e-2, 1e2);
            let eta = signed_log_uniform(&mut rng, 1e-2, 1e2);
            let e = convex_evaluate(&SQUARE, &z, xi, eta, 1e-12).unwrap();
            let d = mixed_direct(xi, eta, z.z());
            assert!((e.xi_eta_mixed - d).norm() < 1e-7 * (1.0 + d.norm()), "({xi},{eta}): {} vs {d}", e.xi_eta_mixed);
        }
    }
}

#[test]
fn eta_axis_collapses() {
    let z = z4(-1.5, 2.0);
    for xi in [-3.0, 0.1, 7.0] {
        let e = convex_evaluate(&SQUARE, &z, xi, 0.0, 1e-10).unwrap();
        assert!(e.eta_deta.norm() < 1e-12 && e.xi_eta_mixed.norm() < 1e-12);
        assert!(e.xi_dxi.norm() <= 2.0 + 1e-9);
    }
    assert!(dm_deta(&SQUARE, &z, 1.0, 0.0, 1e-10).is_err());
    assert!(dm_dxi(&SQUARE, &z, 0.0, 1.0, 1e-10).is_err());
}

#[test]
fn unscaled_derivatives_divide_out_coordinates() {
    let z = z4(-2.0, 0.5);
    let (xi, eta) = (1.3, -0.7);
    let e = convex_evaluate(&SQUARE, &z, xi, eta, 1e-11).unwrap();
    let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-12 * (1.0 + b.norm());
    assert!(close(dm_dxi(&SQUARE, &z, xi, eta, 1e-11).unwrap(), e.xi_dxi / xi));
    assert!(close(dm_deta(&SQUARE, &z, xi, eta, 1e-11).unwrap(), e.eta_deta / eta));
    assert!(close(d2m_dxideta(&SQUARE, &z, xi, eta, 1e-11).unwrap(), e.xi_eta_mixed / (xi * eta)));
}

#[test]
fn sub_bounds_hold() {
    // ∫(1+u²)^s du = √π Γ(−s−½)/Γ(−s): 2 at s = −3/2, 4/3 at s = −5/2.
    assert!((weight_integral(-1.5, 1e-12).unwrap() - 2.0).abs() < 1e-6);
    assert!((weight_integral(-2.5, 1e-12).unwrap() - 4.0 / 3.0).abs() < 1e-6);
    for s in [-1.01, -1.2, -1.5, -3.0] {
        assert!(weight_integral(s, 1e-10).unwrap() <= PI + 1e-6);
    }
    for gamma in [SQUARE, ConvexProfile::Pow { exponent: 3.0 }, ConvexProfile::Pow { exponent: 1.5 }] {
        for eta in [1e-2, 0.3, 1.0, -4.0, 100.0] {
            assert!(inner_piece(&gamma, eta, 1e-10).unwrap() <= 1.0 + 1e-6);
            let t0 = t0_split(&gamma, eta).unwrap();
            assert!((eta.abs() * gamma.value(t0) - 1.0).abs() < 1e-9);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for im in [0.0, 1.0, 5.0] {
        let z = z4(-1.5, im);
        let bound = 2.0 * PI * weight_integral(z.re, 1e-10).unwrap();
        for _ in 0..10 {
            let xi = signed_log_uniform(&mut rng, 1e-2, 1e2);
            let eta = signed_log_uniform(&mut rng, 1e-2, 1e2);
            let e = convex_evaluate(&SQUARE, &z, xi, eta, 1e-10).unwrap();
            assert!((2.0 * PI * e.eta_gamma_prime_integral).norm() <= bound + 1e-6);
            assert!(bound <= 2.0 * PI * PI);
            // ∫|η⁴γ³γ'|W^{s−2}dt = B(2, 1−s) ≤ 1/|s|.
            let s = z.re;
            let bare = e.sixth_bare_integral.norm();
            assert!(bare <= 1.0 / ((1.0 - s) * (2.0 - s)) + 1e-8);
            let zc = z.z();
            assert!((zc * (zc - 1.0) * e.sixth_bare_integral).norm() <= (zc * (zc - 1.0)).norm() / s.abs());
        }
    }
}

#[test]
fn eta_split_reassembles() {
    let z = z4(-1.5, 1.0);
    for &(xi, eta) in &[(0.5, 2.0), (-3.0, 0.1), (10.0, -7.0)] {
        let s = eta_deta_split(&SQUARE, &z, xi, eta, 1e-11).unwrap();
        let e = convex_evaluate(&SQUARE, &z, xi, eta, 1e-11).unwrap();
        assert!((s.total() - e.eta_deta).norm() < 1e-7, "{} vs {}", s.total(), e.eta_deta);
        // Inner first piece: 2π|η|∫_0^{t₀}γ/t dt with the pairing.
        assert!(s.first_inner.norm() <= 2.0 * PI * 2.0 * inner_piece(&SQUARE, eta, 1e-10).unwrap() + 1e-8);
    }
}

#[test]
fn small_bound_sweep_reports_every_point() {
    let grid = BoundGrid { min: 1e-2, max: 1e2, per_axis: 5, all_quadrants: true };
    let sweep = ml_bound_report(&SQUARE, &z4(-1.5, 1.0), &grid, DEFAULT_C0, 1e-9).unwrap();
    assert_eq!(sweep.evaluations.len(), 100);
    assert!(sweep.failures.is_empty());
    assert_eq!(sweep.reports.len(), 4);
    for r in &sweep.reports {
        assert_eq!(r.coverage, 1.0);
        assert!(r.pass, "{r:?}");
        assert!(r.sup_abs > 0.0);
    }
    let json = serde_json::to_value(&sweep.reports[3]).unwrap();
    for key in ["quantity", "sup_abs", "argmax", "paper_bound", "pass", "coverage"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert!(ml_bound_report(&SQUARE, &AnalyticParameter::unrestricted(-0.5, 0.0), &grid, 1.0, 1e-9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn convex_conjugation_symmetry(xi in -20.0f64..20.0, eta in -20.0f64..20.0, re in -3.0f64..-1.01) {
        let z = z4(re, 0.0);
        let a = m_z_convex(&SQUARE, &z, xi, eta, 1e-10).unwrap();
        let b = m_z_convex(&SQUARE, &z, -xi, -eta, 1e-10).unwrap();
        prop_assert!((a - b.conj()).norm() < 2e-9 * (1.0 + a.norm()));
    }
}

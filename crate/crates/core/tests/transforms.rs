use std::f64::consts::PI;

use anisohilbert::transforms::*;
use anisohilbert::{Curve, DilationGroup, Error, PVSpec};
use proptest::prelude::*;

fn line() -> Curve {
    Curve::homogeneous(DilationGroup::new(vec![1.0]).unwrap())
}

fn cubic() -> Curve {
    Curve::homogeneous(DilationGroup::new(vec![1.0, 3.0]).unwrap())
}

fn spec(r: f64) -> PVSpec {
    PVSpec { eps: 1e-6, r, levels_per_octave: 8, abs_tol: 1e-10, rel_tol: 1e-10 }
}

fn sin_field(n: usize) -> GridField {
    GridField::from_fn(GridShape::unit(1, n), ValueSpace::Real, |x| vec![(2.0 * PI * x[0]).sin()]).unwrap()
}

fn max_dev(a: &GridField, b: &GridField) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn classical_hilbert_of_sine_both_routes() {
    // −iπ sgn ξ on the single mode: sin 2πx ↦ −π cos 2πx.
    let f = sin_field(4096);
    let want = GridField::from_fn(f.shape.clone(), ValueSpace::Real, |x| vec![-PI * (2.0 * PI * x[0]).cos()]).unwrap();
    let d = hilbert_direct(&f, &line(), &spec(500.0)).unwrap();
    assert!(max_dev(&d, &want) / PI < 1e-3, "direct {}", max_dev(&d, &want) / PI);
    let cache = MultiplierCache::new(line(), spec(500.0), f.shape.clone()).unwrap();
    let h = hilbert_fourier(&f, &cache).unwrap();
    assert!(max_dev(&h, &want) / PI < 1e-3, "fourier {}", max_dev(&h, &want) / PI);
}

#[test]
fn constants_are_annihilated() {
    let shape = GridShape::unit(2, 64);
    let f = GridField::from_fn(shape.clone(), ValueSpace::SequenceLq { q: 3.0, m: 2 }, |_| vec![1.5, -2.0]).unwrap();
    let d = hilbert_direct(&f, &cubic(), &spec(2.0)).unwrap();
    assert!(d.values.iter().all(|v| v.abs() < 1e-9));
    let cache = MultiplierCache::new(cubic(), spec(2.0), shape).unwrap();
    let h = hilbert_fourier(&f, &cache).unwrap();
    assert!(h.values.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn direct_route_is_linear() {
    let shape = GridShape::unit(2, 64);
    let f = GridField::random_band_limited(shape.clone(), ValueSpace::Real, 1).unwrap();
    let g = GridField::random_band_limited(shape, ValueSpace::Real, 2).unwrap();
    let (a, b) = (0.7, -2.3);
    let s = spec(2.0);
    let lhs = hilbert_direct(&f.combine(a, &g, b).unwrap(), &cubic(), &s).unwrap();
    let rhs = hilbert_direct(&f, &cubic(), &s).unwrap().combine(a, &hilbert_direct(&g, &cubic(), &s).unwrap(), b).unwrap();
    assert!(max_dev(&lhs, &rhs) < 1e-10);
}

#[test]
fn routes_agree_and_converge() {
    let mut last = f64::INFINITY;
    for n in [64, 128, 256] {
        let shape = GridShape::unit(2, n);
        let f = GridField::random_band_limited(shape.clone(), ValueSpace::Real, 5).unwrap();
        let d = hilbert_direct(&f, &cubic(), &spec(2.0)).unwrap();
        let cache = MultiplierCache::new(cubic(), spec(2.0), shape).unwrap();
        let h = hilbert_fourier(&f, &cache).unwrap();
        let gap = relative_l2(&d, &h).unwrap();
        assert!(gap < last, "n={n}: {gap} vs {last}");
        last = gap;
    }
    assert!(last <= 1e-2, "{last}");
}

#[test]
fn single_mode_is_diagonalized_and_output_real() {
    let shape = GridShape::unit(2, 32);
    let (k1, k2) = (1.0, -2.0);
    let f = GridField::from_fn(shape.clone(), ValueSpace::Real, |x| vec![(2.0 * PI * (k1 * x[0] + k2 * x[1])).cos()]).unwrap();
    let cache = MultiplierCache::new(cubic(), spec(2.0), shape).unwrap();
    let m = cache.get(&[1, -2]).unwrap();
    let (re, im) = hilbert_fourier_parts(&f, &cache, false).unwrap();
    // cos θ ↦ Re m·cos θ − Im m·sin θ.
    let want = GridField::from_fn(f.shape.clone(), ValueSpace::Real, |x| {
        let th = 2.0 * PI * (k1 * x[0] + k2 * x[1]);
        vec![m.re * th.cos() - m.im * th.sin()]
    })
    .unwrap();
    assert!(max_dev(&re, &want) < 1e-10);
    assert!(im.values.iter().all(|v| v.abs() < 1e-10));
}

#[test]
fn cache_must_match_grid() {
    let cache = MultiplierCache::new(cubic(), spec(2.0), GridShape::unit(2, 32)).unwrap();
    let f = GridField::random_band_limited(GridShape::unit(2, 64), ValueSpace::Real, 0).unwrap();
    assert!(matches!(hilbert_fourier(&f, &cache), Err(Error::Domain(_))));
}

#[test]
fn non_periodic_margin_is_enforced() {
    let shape = GridShape { n: vec![64, 64], side: vec![4.0, 4.0], periodic: false };
    let bump = |x: &[f64], r: f64| {
        let s = (x[0] * x[0] + x[1] * x[1]) / (r * r);
        vec![if s < 1.0 { (1.0 - s).powi(3) } else { 0.0 }]
    };
    let wide = GridField::from_fn(shape.clone(), ValueSpace::Real, |x| bump(x, 1.8)).unwrap();
    assert!(matches!(hilbert_direct(&wide, &cubic(), &spec(1.0)), Err(Error::Domain(_))));
    // A small bump fits; padding makes the result agree with a periodic box
    // large enough that nothing wraps.
    let small = GridField::from_fn(shape, ValueSpace::Real, |x| bump(x, 0.5)).unwrap();
    let out = hilbert_direct(&small, &cubic(), &spec(1.0)).unwrap();
    let big = GridShape::periodic(vec![128, 128], vec![8.0, 8.0]);
    let f_big = GridField::from_fn(big, ValueSpace::Real, |x| bump(x, 0.5)).unwrap();
    let out_big = hilbert_direct(&f_big, &cubic(), &spec(1.0)).unwrap();
    for k in 0..small.shape.len() {
        let (i, j) = (k / 64, k % 64);
        let kb = (i + 32) * 128 + j + 32;
        assert!((out.values[k] - out_big.values[kb]).abs() < 1e-12);
    }
}

#[test]
fn lp_norm_of_constant_and_scaling() {
    let shape = GridShape::periodic(vec![8, 6], vec![2.0, 3.0]);
    let space = ValueSpace::SequenceLq { q: 1.5, m: 3 };
    let v = vec![1.0, -2.0, 0.5];
    let f = GridField::from_fn(shape, space, |_| v.clone()).unwrap();
    let nv = space.norm(&v);
    for p in [1.0, 2.0, 3.5] {
        let got = lp_norm(&f, p).unwrap();
        assert!((got - 6f64.powf(1.0 / p) * nv).abs() < 1e-12 * got);
        assert!((lp_norm(&f.scaled(-3.0), p).unwrap() - 3.0 * got).abs() < 1e-12 * got);
    }
    assert!(lp_norm(&f, 0.5).is_err());
}

#[test]
fn schatten_two_is_frobenius() {
    let s = ValueSpace::SchattenP { p: 2.0, m: 3 };
    let a = [1.0, 2.0, -1.0, 0.5, 3.0, 0.0, -2.0, 1.0, 4.0];
    let fro = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!((s.norm(&a) - fro).abs() < 1e-12 * fro);
    // Diagonal matrices give the ℓ_p norm of the diagonal.
    let s3 = ValueSpace::SchattenP { p: 3.0, m: 2 };
    assert!((s3.norm(&[2.0, 0.0, 0.0, -1.0]) - 9f64.powf(1.0 / 3.0)).abs() < 1e-12);
}

#[test]
fn value_space_validation() {
    assert!(ValueSpace::SequenceLq { q: 1.0, m: 3 }.validate().is_err());
    assert!(ValueSpace::SchattenP { p: 2.0, m: 9 }.validate().is_err());
    assert!(GridField::new(GridShape::unit(1, 4), ValueSpace::Real, vec![0.0; 3]).is_err());
    assert!(GridField::new(GridShape::unit(1, 4), ValueSpace::Real, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
}

#[test]
fn identity_has_norm_one() {
    for (p, space) in [(1.5, ValueSpace::SchattenP { p: 3.0, m: 2 }), (2.0, ValueSpace::Real), (3.0, ValueSpace::SequenceLq { q: 1.5, m: 4 })] {
        let e = op_norm_estimate(&IdentityOp, p, space, &GridShape::unit(2, 16), 4, 9).unwrap();
        assert!((e.estimate - 1.0).abs() < 1e-10, "{e:?}");
    }
}

#[test]
fn classical_hilbert_norm_is_pi() {
    let shape = GridShape::unit(1, 512);
    let op = FourierHilbert { cache: MultiplierCache::new(line(), spec(500.0), shape.clone()).unwrap() };
    let e = op_norm_estimate(&op, 2.0, ValueSpace::Real, &shape, 4, 3).unwrap();
    assert!(e.estimate >= 0.9 * PI && e.estimate <= PI, "{e:?}");
    assert!(e.power_iteration.unwrap() >= 0.9 * PI);
}

#[test]
fn l2_norm_matches_multiplier_sup() {
    let shape = GridShape::unit(2, 32);
    let op = FourierHilbert { cache: MultiplierCache::new(cubic(), spec(2.0), shape.clone()).unwrap() };
    let e = op_norm_estimate(&op, 2.0, ValueSpace::Real, &shape, 4, 21).unwrap();
    let sup = op.cache.sup_abs().unwrap();
    assert!((e.estimate - sup).abs() <= 0.05 * sup, "{} vs {sup}", e.estimate);
    // Componentwise action: the ℓ₂ and S₂ norms at p = 2 are the scalar one.
    for space in [ValueSpace::SequenceLq { q: 2.0, m: 4 }, ValueSpace::SchattenP { p: 2.0, m: 2 }] {
        let h = op_norm_estimate(&op, 2.0, space, &shape, 4, 21).unwrap();
        assert_eq!(h.power_iteration, e.power_iteration);
    }
    let q3 = op_norm_estimate(&op, 2.0, ValueSpace::SequenceLq { q: 3.0, m: 4 }, &shape, 4, 21).unwrap();
    assert!(q3.power_iteration.is_none());
}

#[test]
fn estimates_are_deterministic() {
    let shape = GridShape::unit(2, 32);
    let op = DirectHilbert::new(cubic(), spec(2.0)).unwrap();
    let space = ValueSpace::SequenceLq { q: 3.0, m: 4 };
    let a = op_norm_estimate(&op, 3.0, space, &shape, 3, 44).unwrap();
    let b = op_norm_estimate(&op, 3.0, space, &shape, 3, 44).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dilation_covariance() {
    // H(f∘δ₂) = (Hf)∘δ₂ up to the moved cutoffs; δ₂ maps nodes to nodes.
    let n = 256;
    let shape = GridShape::unit(2, n);
    let s = spec(4.0);
    let f = GridField::random_band_limited(shape.clone(), ValueSpace::Real, 8).unwrap();
    let idx = |i: usize, mul: usize| (mul * i + n / 2) % n;
    let g = GridField::new(
        shape.clone(),
        ValueSpace::Real,
        (0..n * n).map(|k| f.values[idx(k / n, 2) * n + idx(k % n, 8)]).collect(),
    )
    .unwrap();
    let cache = MultiplierCache::new(cubic(), s, shape.clone()).unwrap();
    let hf = hilbert_fourier(&f, &cache).unwrap();
    let hg = hilbert_fourier(&g, &cache).unwrap();
    let moved = GridField::new(shape, ValueSpace::Real, (0..n * n).map(|k| hf.values[idx(k / n, 2) * n + idx(k % n, 8)]).collect())
        .unwrap();
    let gap = relative_l2(&hg, &moved).unwrap();
    assert!(gap <= 0.02, "{gap}");
}

proptest! {
    #[test]
    fn norms_are_homogeneous_and_subadditive(
        a in prop::collection::vec(-5.0f64..5.0, 9),
        b in prop::collection::vec(-5.0f64..5.0, 9),
        c in -4.0f64..4.0,
        q in 1.05f64..6.0,
    ) {
        for s in [ValueSpace::SequenceLq { q, m: 9 }, ValueSpace::SchattenP { p: q, m: 3 }] {
            let na = s.norm(&a);
            let ca: Vec<f64> = a.iter().map(|x| c * x).collect();
            prop_assert!((s.norm(&ca) - c.abs() * na).abs() <= 1e-10 * (1.0 + na));
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            prop_assert!(s.norm(&sum) <= na + s.norm(&b) + 1e-10);
        }
    }
}

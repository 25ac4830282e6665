//! Hilbert transforms along curves of grid functions with values in small
//! normed spaces: direct quadrature, the Fourier-multiplier route and
//! empirical operator norms.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fft::{fft2, freq_index};
use crate::multipliers::{m_z_curve, AnalyticParameter};
use crate::parallel::par_map;
use crate::pv_quadrature::{gauss_legendre, PVSpec};
use crate::Curve;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
/// Gauss–Legendre points per radial panel.
const PANEL_POINTS: usize = 6;
/// Panels are kept below this many grid cells of curve excursion.
const PANEL_CELLS: f64 = 0.5;
const MAX_RESAMPLES: usize = 5;
const POWER_STEPS: usize = 40;

/// The value space X of a grid function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ValueSpace {
    Real,
    /// ℓ_q^m.
    SequenceLq { q: f64, m: usize },
    /// m × m matrices with the Schatten p-norm, stored row-major.
    SchattenP { p: f64, m: usize },
}

impl ValueSpace {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ValueSpace::Real => Ok(()),
            ValueSpace::SequenceLq { q, m } => {
                if !(q > 1.0 && q.is_finite()) || m == 0 {
                    return domain(format!("ℓ_q^m needs 1 < q < ∞ and m ≥ 1, got q={q} m={m}"));
                }
                Ok(())
            }
            ValueSpace::SchattenP { p, m } => {
                if !(p > 1.0 && p.is_finite()) || !(1..=8).contains(&m) {
                    return domain(format!("S_p^m needs 1 < p < ∞ and 1 ≤ m ≤ 8, got p={p} m={m}"));
                }
                Ok(())
            }
        }
    }

    /// Real coordinates per value.
    pub fn components(&self) -> usize {
        match *self {
            ValueSpace::Real => 1,
            ValueSpace::SequenceLq { m, .. } => m,
            ValueSpace::SchattenP { m, .. } => m * m,
        }
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        match *self {
            ValueSpace::Real => v[0].abs(),
            ValueSpace::SequenceLq { q, .. } => p_sum(v.iter().copied(), q),
            ValueSpace::SchattenP { p, m } => {
                let s = DMatrix::from_row_slice(m, m, v).singular_values();
                p_sum(s.iter().copied(), p)
            }
        }
    }

    /// Real, ℓ_2^m and S_2^m.
    pub fn is_hilbert(&self) -> bool {
        match *self {
            ValueSpace::Real => true,
            ValueSpace::SequenceLq { q, .. } => q == 2.0,
            ValueSpace::SchattenP { p, .. } => p == 2.0,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ValueSpace::Real => "R".into(),
            ValueSpace::SequenceLq { q, m } => format!("l_{q}^{m}"),
            ValueSpace::SchattenP { p, m } => format!("S_{p}^{m}"),
        }
    }
}

/// (Σ|v|^q)^{1/q}, scaled by the largest entry to avoid overflow.
fn p_sum(v: impl Iterator<Item = f64> + Clone, q: f64) -> f64 {
    let top = v.clone().fold(0.0f64, |a, x| a.max(x.abs()));
    if top == 0.0 {
        return 0.0;
    }
    top * v.map(|x| (x.abs() / top).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// A centred box with `n[a]` nodes along a side of length `side[a]`; node i sits
/// at −side/2 + i·side/n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridShape {
    pub n: Vec<usize>,
    pub side: Vec<f64>,
    pub periodic: bool,
}

impl GridShape {
    pub fn periodic(n: Vec<usize>, side: Vec<f64>) -> Self {
        Self { n, side, periodic: true }
    }

    /// Unit periodic square (or interval) with n nodes per axis.
    pub fn unit(dim: usize, n: usize) -> Self {
        Self::periodic(vec![n; dim], vec![1.0; dim])
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.n.len()) || self.side.len() != self.n.len() {
            return domain("grids have one or two axes with one side length each");
        }
        if self.n.iter().any(|&k| k < 2) || self.side.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return domain("every axis needs at least two nodes and a positive side");
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self, a: usize) -> f64 {
        self.side[a] / self.n[a] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.side.iter().product()
    }

    /// Coordinates of node `k` (row-major, axis 0 slowest).
    pub fn point(&self, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let mut rest = k;
        for a in (0..self.dim()).rev() {
            let i = rest % self.n[a];
            rest /= self.n[a];
            out[a] = -0.5 * self.side[a] + i as f64 * self.step(a);
        }
        out
    }

    /// The shape as an (n0, n1) array for the 2D transform.
    fn dims2(&self) -> [usize; 2] {
        if self.dim() == 1 {
            [1, self.n[0]]
        } else {
            [self.n[0], self.n[1]]
        }
    }

    /// Signed frequency (k_a) of bin `b` of the row-major transform.
    fn frequency(&self, b: usize) -> Vec<i64> {
        let [_, n1] = self.dims2();
        match self.dim() {
            1 => vec![freq_index(b, self.n[0])],
            _ => vec![freq_index(b / n1, self.n[0]), freq_index(b % n1, self.n[1])],
        }
    }
}

/// Grid samples of an X-valued function, point-major with `space.components()`
/// reals per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub shape: GridShape,
    pub space: ValueSpace,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl GridField {
    pub fn new(shape: GridShape, space: ValueSpace, values: Vec<f64>) -> Result<Self> {
        shape.validate()?;
        space.validate()?;
        let want = shape.len() * space.components();
        if values.len() != want {
            return Err(Error::Dimension { expected: want, got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("field values must be finite");
        }
        Ok(Self { shape, space, values })
    }

    pub fn zeros(shape: GridShape, space: ValueSpace) -> Result<Self> {
        let n = shape.len() * space.components();
        Self::new(shape, space, vec![0.0; n])
    }

    /// Samples f(x) ∈ ℝ^{components} at every node.
    pub fn from_fn<F: Fn(&[f64]) -> Vec<f64> + Sync>(shape: GridShape, space: ValueSpace, f: F) -> Result<Self> {
        shape.validate()?;
        space.validate()?;
        let c = space.components();
        let rows = par_map(shape.len(), |k| f(&shape.point(k)));
        if let Some(r) = rows.iter().find(|r| r.len() != c) {
            return Err(Error::Dimension { expected: c, got: r.len() });
        }
        Self::new(shape, space, rows.concat())
    }

    /// Seeded real field whose Fourier coefficients live on the lowest octave
    /// 1 ≤ max|k_a| ≤ 2, with Gaussian cosine and sine amplitudes per coordinate.
    pub fn random_band_limited(shape: GridShape, space: ValueSpace, seed: u64) -> Result<Self> {
        shape.validate()?;
        space.validate()?;
        let c = space.components();
        let modes = low_octave_modes(shape.dim());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<(f64, f64)> = (0..modes.len() * c).map(|_| (gaussian(&mut rng), gaussian(&mut rng))).collect();
        let side = shape.side.clone();
        Self::from_fn(shape, space, |x| {
            let mut out = vec![0.0; c];
            for (i, k) in modes.iter().enumerate() {
                let arg: f64 = k.iter().zip(x).zip(&side).map(|((k, x), l)| 2.0 * PI * *k as f64 * x / l).sum();
                let (s, co) = arg.sin_cos();
                for (j, o) in out.iter_mut().enumerate() {
                    let (a, b) = amps[i * c + j];
                    *o += a * co + b * s;
                }
            }
            out
        })
    }

    /// Value at node k.
    pub fn value(&self, k: usize) -> &[f64] {
        let c = self.space.components();
        &self.values[k * c..(k + 1) * c]
    }

    /// One real coordinate over the whole grid.
    pub fn component(&self, j: usize) -> Vec<f64> {
        let c = self.space.components();
        self.values.iter().skip(j).step_by(c).copied().collect()
    }

    fn from_components(shape: GridShape, space: ValueSpace, comps: Vec<Vec<f64>>) -> Self {
        let (n, c) = (shape.len(), comps.len());
        let mut values = vec![0.0; n * c];
        for (j, col) in comps.iter().enumerate() {
            for (k, v) in col.iter().enumerate() {
                values[k * c + j] = *v;
            }
        }
        Self { shape, space, values }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// a·self + b·other on the same grid and space.
    pub fn combine(&self, a: f64, other: &GridField, b: f64) -> Result<Self> {
        if self.shape != other.shape || self.space != other.space {
            return domain("fields live on different grids or value spaces");
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { values, ..self.clone() })
    }

    /// CSV with coordinates then value components, one node per row.
    pub fn to_csv(&self) -> String {
        let d = self.shape.dim();
        let c = self.space.components();
        let mut head: Vec<String> = (1..=d).map(|a| format!("x{a}")).collect();
        head.extend((1..=c).map(|j| format!("v{j}")));
        let mut s = head.join(",");
        s.push('\n');
        for k in 0..self.shape.len() {
            let row: Vec<String> = self.shape.point(k).iter().chain(self.value(k)).map(|v| format!("{v:e}")).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// One representative of each ±k pair with 1 ≤ max|k_a| ≤ 2.
fn low_octave_modes(dim: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let r = -2..=2i64;
    let all: Vec<Vec<i64>> = match dim {
        1 => r.map(|k| vec![k]).collect(),
        _ => r.clone().flat_map(|a| r.clone().map(move |b| vec![a, b])).collect(),
    };
    for k in all {
        let first = k.iter().find(|v| **v != 0);
        if matches!(first, Some(v) if *v > 0) {
            out.push(k);
        }
    }
    out
}

/// (cell volume · Σ‖f(x)‖_X^p)^{1/p}.
pub fn lp_norm(f: &GridField, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return domain(format!("need 1 ≤ p < ∞, got {p}"));
    }
    let norms: Vec<f64> = (0..f.shape.len()).map(|k| f.space.norm(f.value(k))).collect();
    let vol = f.shape.cell_volume();
    Ok(vol.powf(1.0 / p) * p_sum(norms.into_iter(), p))
}

/// Relative L² distance ‖a − b‖/‖b‖ over all coordinates.
pub fn relative_l2(a: &GridField, b: &GridField) -> Result<f64> {
    if a.shape != b.shape || a.space != b.space {
        return domain("fields live on different grids or value spaces");
    }
    let num: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.values.iter().map(|y| y * y).sum();
    Ok((num / den).sqrt())
}

/// Checks the curve lives in the grid's dimension.
fn check_curve(curve: &Curve, shape: &GridShape) -> Result<()> {
    if curve.dim() != shape.dim() {
        return Err(Error::Dimension { expected: shape.dim(), got: curve.dim() });
    }
    Ok(())
}

/// Componentwise max |Γ_a(t)| over |t| ≤ R.
fn curve_reach(curve: &Curve, r: f64) -> Vec<f64> {
    let d = curve.dim();
    let mut out = vec![0.0f64; d];
    let mut g = vec![0.0; d];
    for i in 0..=256 {
        let t = r * (i as f64 / 128.0 - 1.0);
        curve.eval_into(t, &mut g);
        for (o, v) in out.iter_mut().zip(&g) {
            *o = o.max(v.abs());
        }
    }
    out
}

/// Real kernel on a (possibly padded) periodic grid whose circular
/// convolution with a grid function is the multilinear-interpolated
/// principal value along the curve.
struct Splat {
    dims: [usize; 2],
    h: [f64; 2],
    data: Vec<f64>,
}

impl Splat {
    fn new(shape: &GridShape) -> Self {
        let dims = shape.dims2();
        let h = if shape.dim() == 1 { [1.0, shape.step(0)] } else { [shape.step(0), shape.step(1)] };
        Self { dims, h, data: vec![0.0; dims[0] * dims[1]] }
    }

    fn add(&mut self, u: &[f64], w: f64) {
        let (q0, q1) = if u.len() == 1 { (0.0, u[0] / self.h[1]) } else { (u[0] / self.h[0], u[1] / self.h[1]) };
        let (f0, f1) = (q0.floor(), q1.floor());
        let (r0, r1) = (q0 - f0, q1 - f1);
        let [n0, n1] = self.dims;
        let i0 = (f0 as i64).rem_euclid(n0 as i64) as usize;
        let j0 = (f1 as i64).rem_euclid(n1 as i64) as usize;
        let (i1, j1) = ((i0 + 1) % n0, (j0 + 1) % n1);
        self.data[i0 * n1 + j0] += w * (1.0 - r0) * (1.0 - r1);
        self.data[i0 * n1 + j1] += w * (1.0 - r0) * r1;
        self.data[i1 * n1 + j0] += w * r0 * (1.0 - r1);
        self.data[i1 * n1 + j1] += w * r0 * r1;
    }

    /// Adds scale·p.v.∫_{ε<|t|<R} δ_{Γ(t)} dt/t; with `one_sided` only t > 0.
    fn deposit_curve(&mut self, curve: &Curve, spec: &PVSpec, scale: f64, one_sided: bool) {
        let (gx, gw) = gauss_legendre(PANEL_POINTS);
        let d = curve.dim();
        let (mut g, mut dg) = (vec![0.0; d], vec![0.0; d]);
        let cells = |dg: &[f64], h: &[f64; 2]| -> f64 {
            if d == 1 {
                dg[0].abs() / h[1]
            } else {
                dg[0].abs() / h[0] + dg[1].abs() / h[1]
            }
        };
        let k0 = spec.eps.log2().floor() as i32;
        let k1 = spec.r.log2().ceil() as i32;
        for k in k0..k1 {
            let a = 2f64.powi(k).max(spec.eps);
            let b = 2f64.powi(k + 1).min(spec.r);
            if b <= a {
                continue;
            }
            let mut speed = 0.0f64;
            for t in [a, b, -a, -b] {
                curve.derivative_into(t, &mut dg);
                speed = speed.max(cells(&dg, &self.h));
            }
            let panels = ((speed * (b - a) / PANEL_CELLS).ceil() as usize).max(spec.levels_per_octave / 2).max(1);
            let step = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + p as f64 * step;
                for (x, w) in gx.iter().zip(&gw) {
                    let t = lo + 0.5 * step * (1.0 + x);
                    let wt = scale * 0.5 * step * w / t;
                    curve.eval_into(t, &mut g);
                    self.add(&g, wt);
                    if !one_sided {
                        curve.eval_into(-t, &mut g);
                        self.add(&g, -wt);
                    }
                }
            }
        }
    }

    fn spectrum(self) -> Vec<Complex64> {
        let [n0, n1] = self.dims;
        let mut c: Vec<Complex64> = self.data.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        fft2(&mut c, n0, n1, false);
        c
    }
}

/// Circular convolution of every coordinate with a kernel given by its
/// spectrum on `shape`; `conj` applies the adjoint.
fn convolve(f: &GridField, shape: &GridShape, spec: &[Complex64], conj: bool) -> GridField {
    let [n0, n1] = shape.dims2();
    let c = f.space.components();
    let comps = par_map(c, |j| {
        let mut a: Vec<Complex64> = f.component(j).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        fft2(&mut a, n0, n1, false);
        for (v, m) in a.iter_mut().zip(spec) {
            *v *= if conj { m.conj() } else { *m };
        }
        fft2(&mut a, n0, n1, true);
        let s = 1.0 / (n0 * n1) as f64;
        a.into_iter().map(|v| v.re * s).collect::<Vec<f64>>()
    });
    GridField::from_components(shape.clone(), f.space, comps)
}

/// For a non-periodic field: the padded shape that keeps the convolution
/// free of wrap-around, after checking the support margin.
fn padded_shape(f: &GridField, reach: &[f64]) -> Result<(GridShape, Vec<usize>)> {
    let s = &f.shape;
    for k in 0..s.len() {
        if f.value(k).iter().all(|v| *v == 0.0) {
            continue;
        }
        let x = s.point(k);
        for a in 0..s.dim() {
            if x[a].abs() + reach[a] > 0.5 * s.side[a] {
                return domain(format!(
                    "support reaches {} on axis {} but the margin needs |x| ≤ {}",
                    x[a],
                    a + 1,
                    0.5 * s.side[a] - reach[a]
                ));
            }
        }
    }
    let extra: Vec<usize> = (0..s.dim()).map(|a| (reach[a] / s.step(a)).ceil() as usize + 2).collect();
    let n: Vec<usize> = (0..s.dim()).map(|a| s.n[a] + extra[a]).collect();
    let side: Vec<f64> = (0..s.dim()).map(|a| n[a] as f64 * s.step(a)).collect();
    Ok((GridShape { n, side, periodic: true }, extra))
}

/// Zero-pads (extending past the top of each axis) or crops back.
fn reshape(f: &GridField, to: &GridShape) -> GridField {
    let c = f.space.components();
    let from = f.shape.dims2();
    let dst = to.dims2();
    let mut values = vec![0.0; to.len() * c];
    for i in 0..from[0].min(dst[0]) {
        for j in 0..from[1].min(dst[1]) {
            let (s, d) = (i * from[1] + j, i * dst[1] + j);
            values[d * c..(d + 1) * c].copy_from_slice(&f.values[s * c..(s + 1) * c]);
        }
    }
    GridField { shape: to.clone(), space: f.space, values }
}

/// Weighted sum of principal values along several curves; `one_sided` keeps
/// only t > 0.
pub(crate) struct CurveTerm<'a> {
    pub curve: &'a Curve,
    pub weight: f64,
    pub one_sided: bool,
}

pub(crate) fn direct_sum(f: &GridField, terms: &[CurveTerm], spec: &PVSpec) -> Result<GridField> {
    spec.validate()?;
    for t in terms {
        check_curve(t.curve, &f.shape)?;
    }
    let (shape, padded) = if f.shape.periodic {
        (f.shape.clone(), None)
    } else {
        let mut reach = vec![0.0f64; f.shape.dim()];
        for t in terms {
            for (r, v) in reach.iter_mut().zip(curve_reach(t.curve, spec.r)) {
                *r = r.max(v);
            }
        }
        let (s, _) = padded_shape(f, &reach)?;
        (s, Some(f.shape.clone()))
    };
    let mut k = Splat::new(&shape);
    for t in terms {
        k.deposit_curve(t.curve, spec, t.weight, t.one_sided);
    }
    let spectrum = k.spectrum();
    match padded {
        None => Ok(convolve(f, &shape, &spectrum, false)),
        Some(orig) => Ok(reshape(&convolve(&reshape(f, &shape), &shape, &spectrum, false), &orig)),
    }
}

/// p.v.∫_{ε<|t|<R} f(x − Γ(t)) dt/t with f interpolated multilinearly between
/// nodes. Periodic fields wrap; others must vanish within max|Γ(t)| of the edge.
pub fn hilbert_direct(f: &GridField, curve: &Curve, spec: &PVSpec) -> Result<GridField> {
    direct_sum(f, &[CurveTerm { curve, weight: 1.0, one_sided: false }], spec)
}

/// m₀^{ε,R}(k/L) on a periodic grid, computed on demand and kept.
pub struct MultiplierCache {
    curve: Curve,
    spec: PVSpec,
    shape: GridShape,
    values: Mutex<HashMap<Vec<i64>, Complex64>>,
}

impl MultiplierCache {
    pub fn new(curve: Curve, spec: PVSpec, shape: GridShape) -> Result<Self> {
        shape.validate()?;
        spec.validate()?;
        check_curve(&curve, &shape)?;
        if !shape.periodic {
            return domain("the multiplier route needs a periodic grid");
        }
        Ok(Self { curve, spec, shape, values: Mutex::new(HashMap::new()) })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn spec(&self) -> &PVSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.values.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn compute(&self, k: &[i64]) -> Result<Complex64> {
        if k.iter().all(|v| *v == 0) {
            return Ok(ZERO);
        }
        let xi: Vec<f64> = k.iter().zip(&self.shape.side).map(|(k, l)| *k as f64 / l).collect();
        m_z_curve(&self.curve, &AnalyticParameter::unrestricted(0.0, 0.0), &xi, &self.spec)
    }

    /// Makes sure the given frequencies are present.
    pub fn ensure(&self, ks: &[Vec<i64>]) -> Result<()> {
        let missing: Vec<Vec<i64>> = {
            let map = self.values.lock().unwrap();
            ks.iter().filter(|k| !map.contains_key(*k)).cloned().collect()
        };
        let vals = par_map(missing.len(), |i| self.compute(&missing[i]));
        let mut map = self.values.lock().unwrap();
        for (k, v) in missing.into_iter().zip(vals) {
            map.insert(k, v?);
        }
        Ok(())
    }

    /// m₀ at frequency k (integer multiples of 1/side).
    pub fn get(&self, k: &[i64]) -> Result<Complex64> {
        self.ensure(&[k.to_vec()])?;
        Ok(self.values.lock().unwrap()[k])
    }

    /// Every bin of the grid, in transform order.
    pub fn full(&self) -> Result<Vec<Complex64>> {
        let ks: Vec<Vec<i64>> = (0..self.shape.len()).map(|b| self.shape.frequency(b)).collect();
        self.ensure(&ks)?;
        let map = self.values.lock().unwrap();
        Ok(ks.iter().map(|k| map[k]).collect())
    }

    /// sup |m₀| over the dual grid.
    pub fn sup_abs(&self) -> Result<f64> {
        Ok(self.full()?.iter().fold(0.0, |a, m| a.max(m.norm())))
    }
}

/// Real and imaginary parts of F⁻¹[m₀·F f], transforming only frequencies
/// where some coordinate of f has a non-negligible coefficient.
pub fn hilbert_fourier_parts(f: &GridField, cache: &MultiplierCache, adjoint: bool) -> Result<(GridField, GridField)> {
    if f.shape != cache.shape {
        return domain("multiplier cache was built for a different grid");
    }
    let shape = &f.shape;
    let [n0, n1] = shape.dims2();
    let c = f.space.components();
    let coeffs: Vec<Vec<Complex64>> = par_map(c, |j| {
        let mut a: Vec<Complex64> = f.component(j).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        fft2(&mut a, n0, n1, false);
        a
    });
    let top = coeffs.iter().flatten().fold(0.0f64, |a, v| a.max(v.norm()));
    let live: Vec<usize> = (0..shape.len()).filter(|&b| coeffs.iter().any(|a| a[b].norm() > 1e-14 * top)).collect();
    let ks: Vec<Vec<i64>> = live.iter().map(|&b| shape.frequency(b)).collect();
    cache.ensure(&ks)?;
    let mult: Vec<Complex64> = {
        let map = cache.values.lock().unwrap();
        ks.iter().map(|k| if adjoint { map[k].conj() } else { map[k] }).collect()
    };
    let s = 1.0 / shape.len() as f64;
    let parts = par_map(c, |j| {
        let mut out = vec![ZERO; shape.len()];
        for (&b, m) in live.iter().zip(&mult) {
            out[b] = coeffs[j][b] * m;
        }
        fft2(&mut out, n0, n1, true);
        (out.iter().map(|v| v.re * s).collect::<Vec<f64>>(), out.iter().map(|v| v.im * s).collect::<Vec<f64>>())
    });
    let (re, im): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    Ok((
        GridField::from_components(shape.clone(), f.space, re),
        GridField::from_components(shape.clone(), f.space, im),
    ))
}

/// ℋf through the multiplier m₀ with the cache's cutoffs, applied to each
/// value coordinate.
pub fn hilbert_fourier(f: &GridField, cache: &MultiplierCache) -> Result<GridField> {
    Ok(hilbert_fourier_parts(f, cache, false)?.0)
}

/// A bounded linear operator on grid fields.
pub trait GridOperator: Sync {
    fn label(&self) -> String;
    fn apply(&self, f: &GridField) -> Result<GridField>;
    fn adjoint_apply(&self, f: &GridField) -> Result<GridField>;
}

pub struct IdentityOp;

impl GridOperator for IdentityOp {
    fn label(&self) -> String {
        "identity".into()
    }
    fn apply(&self, f: &GridField) -> Result<GridField> {
        Ok(f.clone())
    }
    fn adjoint_apply(&self, f: &GridField) -> Result<GridField> {
        Ok(f.clone())
    }
}

/// ℋ by the multiplier route on the cache's grid.
pub struct FourierHilbert {
    pub cache: MultiplierCache,
}

impl GridOperator for FourierHilbert {
    fn label(&self) -> String {
        "fourier".into()
    }
    fn apply(&self, f: &GridField) -> Result<GridField> {
        Ok(hilbert_fourier_parts(f, &self.cache, false)?.0)
    }
    fn adjoint_apply(&self, f: &GridField) -> Result<GridField> {
        Ok(hilbert_fourier_parts(f, &self.cache, true)?.0)
    }
}

/// ℋ by direct quadrature on periodic grids, keeping the kernel spectrum per grid.
pub struct DirectHilbert {
    pub curve: Curve,
    pub spec: PVSpec,
    kernels: Mutex<Vec<(GridShape, Arc<Vec<Complex64>>)>>,
}

impl DirectHilbert {
    pub fn new(curve: Curve, spec: PVSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { curve, spec, kernels: Mutex::new(Vec::new()) })
    }

    fn spectrum(&self, shape: &GridShape) -> Result<Arc<Vec<Complex64>>> {
        check_curve(&self.curve, shape)?;
        if !shape.periodic {
            return domain("the cached direct operator needs a periodic grid; use hilbert_direct");
        }
        if let Some((_, s)) = self.kernels.lock().unwrap().iter().find(|(s, _)| s == shape) {
            return Ok(s.clone());
        }
        let mut k = Splat::new(shape);
        k.deposit_curve(&self.curve, &self.spec, 1.0, false);
        let s = Arc::new(k.spectrum());
        self.kernels.lock().unwrap().push((shape.clone(), s.clone()));
        Ok(s)
    }
}

impl GridOperator for DirectHilbert {
    fn label(&self) -> String {
        "direct".into()
    }
    fn apply(&self, f: &GridField) -> Result<GridField> {
        let s = self.spectrum(&f.shape)?;
        Ok(convolve(f, &f.shape, &s, false))
    }
    fn adjoint_apply(&self, f: &GridField) -> Result<GridField> {
        let s = self.spectrum(&f.shape)?;
        Ok(convolve(f, &f.shape, &s, true))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpNormEstimate {
    pub operator: String,
    pub p: f64,
    pub space: ValueSpace,
    pub n: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// lp_norm(op f)/lp_norm(f) per trial.
    pub ratios: Vec<f64>,
    /// √(‖A*A x‖/‖x‖) after power iteration, for p = 2 and Hilbert values.
    pub power_iteration: Option<f64>,
    pub estimate: f64,
}

fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ (trial + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Largest observed ‖op f‖_p/‖f‖_p over seeded band-limited fields, plus a
/// power-iteration estimate when p = 2 and the value space is Hilbert. The
/// operator acts componentwise, so its norm there equals the scalar one.
pub fn op_norm_estimate(
    op: &dyn GridOperator,
    p: f64,
    space: ValueSpace,
    shape: &GridShape,
    trials: usize,
    seed: u64,
) -> Result<OpNormEstimate> {
    if trials == 0 {
        return domain("need at least one trial");
    }
    if !(p >= 1.0 && p.is_finite()) {
        return domain(format!("need 1 ≤ p < ∞, got {p}"));
    }
    let ratios = par_map(trials, |t| -> Result<f64> {
        for attempt in 0..MAX_RESAMPLES as u64 {
            let s = trial_seed(seed, t as u64 * MAX_RESAMPLES as u64 + attempt);
            let f = GridField::random_band_limited(shape.clone(), space, s)?;
            let nf = lp_norm(&f, p)?;
            if nf > 0.0 {
                return Ok(lp_norm(&op.apply(&f)?, p)? / nf);
            }
        }
        Err(Error::Validation("every resampled test field had zero norm".into()))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let power_iteration = if p == 2.0 && space.is_hilbert() { Some(power_iterate(op, shape, seed)?) } else { None };
    let estimate = ratios.iter().copied().chain(power_iteration).fold(0.0, f64::max);
    Ok(OpNormEstimate {
        operator: op.label(),
        p,
        space,
        n: shape.n.clone(),
        trials,
        seed,
        ratios,
        power_iteration,
        estimate,
    })
}

/// Power iteration on A*A from seeded white noise.
fn power_iterate(op: &dyn GridOperator, shape: &GridShape, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, u64::MAX - 1));
    let noise: Vec<f64> = (0..shape.len()).map(|_| rng.gen::<f64>() - 0.5).collect();
    let mut x = GridField::new(shape.clone(), ValueSpace::Real, noise)?;
    let mut est = 0.0;
    for _ in 0..POWER_STEPS {
        let nx = lp_norm(&x, 2.0)?;
        if nx == 0.0 {
            return Ok(0.0);
        }
        let y = op.adjoint_apply(&op.apply(&x)?)?;
        let ny = lp_norm(&y, 2.0)?;
        est = (ny / nx).sqrt();
        x = y.scaled(1.0 / ny);
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_octave_has_one_of_each_pair() {
        assert_eq!(low_octave_modes(1), vec![vec![1], vec![2]]);
        let m = low_octave_modes(2);
        assert_eq!(m.len(), 12);
        assert!(m.iter().all(|k| !m.contains(&vec![-k[0], -k[1]])));
    }

    #[test]
    fn splat_kernel_is_odd_for_odd_curves() {
        let shape = GridShape::unit(2, 16);
        let mut k = Splat::new(&shape);
        let spec = PVSpec::default().with_cutoffs(1e-3, 2.0);
        k.deposit_curve(&Curve::model_parabola(), &spec, 1.0, false);
        let n = 16;
        for i in 0..n {
            for j in 0..n {
                let (mi, mj) = ((n - i) % n, (n - j) % n);
                assert!((k.data[i * n + j] + k.data[mi * n + mj]).abs() < 1e-9);
            }
        }
    }
}

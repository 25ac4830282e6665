//! Principal-value and oscillatory quadrature.
//!
//! Integrands are written as A(t)·e^{-iφ(t)} with a (possibly vector-valued)
//! amplitude A and a real phase φ. [`pv_integrate`] computes
//! p.v.∫_{ε<|t|<R} A(t)e^{-iφ(t)} dt/t over dyadic shells [2^k, 2^{k+1}], pairing
//! t with −t inside every shell. Shells whose phase is large and monotone are
//! integrated by Levin collocation; everything else goes through adaptive
//! Gauss–Kronrod with panels split whenever the phase varies by more than π.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Cutoffs and tolerances for [`pv_integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PVSpec {
    pub eps: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub levels_per_octave: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for PVSpec {
    fn default() -> Self {
        Self { eps: 1e-6, r: 1e8, levels_per_octave: 8, abs_tol: 1e-9, rel_tol: 1e-9 }
    }
}

impl PVSpec {
    /// Default spec with R chosen so the discarded tail ∫_R^∞ t^{Re z−1}dt is at
    /// most 1e-8, capped at 1e8.
    pub fn for_exponent(re_z: f64) -> Result<Self> {
        Ok(Self { r: radius_for_tail(re_z, 1e-8)?.min(1e8), ..Self::default() })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self.rel_tol = tol;
        self
    }

    pub fn with_cutoffs(mut self, eps: f64, r: f64) -> Self {
        self.eps = eps;
        self.r = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.r > self.eps && self.r.is_finite()) {
            return domain(format!("need 0 < eps < R, got eps={} R={}", self.eps, self.r));
        }
        if self.levels_per_octave < 4 {
            return domain("levels_per_octave must be at least 4");
        }
        for t in [self.abs_tol, self.rel_tol] {
            if !(t > 0.0 && t < 1.0) {
                return domain(format!("tolerances must lie in (0,1), got {t}"));
            }
        }
        Ok(())
    }
}

/// ∫_R^∞ t^{Re z − 1} dt = R^{Re z}/|Re z|.
pub fn tail_estimate(re_z: f64, r: f64) -> Result<f64> {
    if !(re_z < 0.0) {
        return domain(format!("tail bound needs Re z < 0, got {re_z}"));
    }
    if !(r > 0.0) {
        return domain("tail bound needs R > 0");
    }
    Ok(r.powf(re_z) / re_z.abs())
}

/// Smallest R with tail_estimate(re_z, R) ≤ target.
pub fn radius_for_tail(re_z: f64, target: f64) -> Result<f64> {
    if !(re_z < 0.0) {
        return domain(format!("tail bound needs Re z < 0, got {re_z}"));
    }
    Ok((target * re_z.abs()).powf(1.0 / re_z))
}

/// An integrand A(t)e^{-iφ(t)} with a vector amplitude sharing one phase.
pub trait OscillatoryIntegrand: Sync {
    fn dim(&self) -> usize {
        1
    }
    fn phase(&self, t: f64) -> f64;
    fn phase_derivative(&self, t: f64) -> f64;
    fn amplitude(&self, t: f64, out: &mut [Complex64]);
}

/// Non-oscillatory scalar integrand from a closure.
pub struct FnIntegrand<F>(pub F);

impl<F: Fn(f64) -> Complex64 + Sync> OscillatoryIntegrand for FnIntegrand<F> {
    fn phase(&self, _t: f64) -> f64 {
        0.0
    }
    fn phase_derivative(&self, _t: f64) -> f64 {
        0.0
    }
    fn amplitude(&self, t: f64, out: &mut [Complex64]) {
        out[0] = (self.0)(t);
    }
}

/// Scalar integrand from amplitude, phase and phase-derivative closures.
pub struct PhaseIntegrand<A, P, D> {
    pub amplitude: A,
    pub phase: P,
    pub phase_derivative: D,
}

impl<A, P, D> OscillatoryIntegrand for PhaseIntegrand<A, P, D>
where
    A: Fn(f64) -> Complex64 + Sync,
    P: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    fn phase(&self, t: f64) -> f64 {
        (self.phase)(t)
    }
    fn phase_derivative(&self, t: f64) -> f64 {
        (self.phase_derivative)(t)
    }
    fn amplitude(&self, t: f64, out: &mut [Complex64]) {
        out[0] = (self.amplitude)(t);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub value: Vec<Complex64>,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn scalar(&self) -> Complex64 {
        self.value[0]
    }
}

// G7K15 abscissae and weights on [-1,1]; index 0 is the centre.
const XGK: [f64; 8] = [
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];
const WGK: [f64; 8] = [
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];
// Gauss weights for XGK[0], XGK[2], XGK[4], XGK[6].
const WG: [f64; 4] = [
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

const MAX_DEPTH: usize = 40;
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;
const LEVIN_ROUNDOFF: f64 = 1e3 * f64::EPSILON;
const LEVIN_LO: usize = 16;
const LEVIN_HI: usize = 24;
/// Phase variation (radians) above which Levin collocation is attempted.
const LEVIN_MIN_VARIATION: f64 = 4.0 * PI;

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    /// [g(s) − g(−s)]/s.
    Paired,
    /// σ g(σs)/s with σ = ±1.
    Branch(f64),
    /// g(s) without the 1/s weight.
    Plain,
}

struct Engine<'a, G: OscillatoryIntegrand + ?Sized> {
    g: &'a G,
    d: usize,
    amp: Vec<Complex64>,
    kron: Vec<Complex64>,
    gauss: Vec<Complex64>,
    evals: usize,
    failed: bool,
    error: f64,
}

impl<'a, G: OscillatoryIntegrand + ?Sized> Engine<'a, G> {
    fn new(g: &'a G) -> Self {
        let d = g.dim();
        Self {
            g,
            d,
            amp: vec![Complex64::new(0.0, 0.0); d],
            kron: vec![Complex64::new(0.0, 0.0); d],
            gauss: vec![Complex64::new(0.0, 0.0); d],
            evals: 0,
            failed: false,
            error: 0.0,
        }
    }

    /// Adds the mode's integrand value at s, scaled by w, into `acc` and records
    /// the phases seen for variation tracking.
    fn accumulate(&mut self, mode: Mode, s: f64, w: f64, acc: &mut [Complex64], phases: &mut [f64; 2]) {
        let mut one = |sig: f64, scale: f64, this: &mut Self, slot: usize, acc: &mut [Complex64]| {
            let t = sig * s;
            this.g.amplitude(t, &mut this.amp);
            this.evals += 1;
            let ph = this.g.phase(t);
            phases[slot] = ph;
            let e = Complex64::from_polar(scale, -ph);
            for (a, v) in acc.iter_mut().zip(&this.amp) {
                *a += v * e;
            }
        };
        match mode {
            Mode::Paired => {
                one(1.0, w / s, self, 0, acc);
                one(-1.0, -w / s, self, 1, acc);
            }
            Mode::Branch(sig) => one(sig, sig * w / s, self, 0, acc),
            Mode::Plain => one(1.0, w, self, 0, acc),
        }
    }

    /// One G7K15 panel; accumulates the Kronrod value into `out`. Returns
    /// (error estimate, max phase variation over the branches, ∫|A| estimate).
    fn gk_panel(&mut self, mode: Mode, a: f64, b: f64, out: &mut [Complex64]) -> (f64, f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for k in 0..self.d {
            self.kron[k] = Complex64::new(0.0, 0.0);
            self.gauss[k] = Complex64::new(0.0, 0.0);
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut env = 0.0;
        let mut tmp = vec![Complex64::new(0.0, 0.0); self.d];
        let mut phases = [0.0; 2];
        for j in 0..8 {
            let signs: &[f64] = if j == 0 { &[0.0] } else { &[-1.0, 1.0] };
            for &sg in signs {
                let s = c + sg * h * XGK[j];
                tmp.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                self.accumulate(mode, s, 1.0, &mut tmp, &mut phases);
                env += WGK[j] * h * tmp.iter().map(|v| v.norm()).fold(0.0, f64::max);
                for k in 0..self.d {
                    self.kron[k] += tmp[k] * (WGK[j] * h);
                    if j % 2 == 0 {
                        self.gauss[k] += tmp[k] * (WG[j / 2] * h);
                    }
                }
                let nb = if mode == Mode::Paired { 2 } else { 1 };
                for q in 0..nb {
                    lo[q] = lo[q].min(phases[q]);
                    hi[q] = hi[q].max(phases[q]);
                }
            }
        }
        let mut err = 0.0f64;
        for k in 0..self.d {
            err = err.max((self.kron[k] - self.gauss[k]).norm());
            out[k] += self.kron[k];
        }
        let nb = if mode == Mode::Paired { 2 } else { 1 };
        let var = (0..nb).map(|q| hi[q] - lo[q]).fold(0.0, f64::max);
        (err, var, env)
    }

    /// Adaptive GK on [a,b]; panels whose phase varies by more than π are split.
    fn gk_adaptive(&mut self, mode: Mode, a: f64, b: f64, tol: f64, depth: usize, out: &mut [Complex64]) -> f64 {
        let mut local = vec![Complex64::new(0.0, 0.0); self.d];
        let (err, var, env) = self.gk_panel(mode, a, b, &mut local);
        // Below this the Kronrod–Gauss difference is rounding noise.
        let floor = ROUNDOFF * env;
        let resolved = err <= tol.max(floor) && var <= PI;
        if resolved || depth >= MAX_DEPTH || (b - a) <= 1e-15 * a.abs().max(b.abs()) {
            if !resolved && err > tol.max(floor) {
                self.failed = true;
            }
            self.error += err;
            for k in 0..self.d {
                out[k] += local[k];
            }
            return env;
        }
        let m = 0.5 * (a + b);
        self.gk_adaptive(mode, a, m, 0.5 * tol, depth + 1, out)
            + self.gk_adaptive(mode, m, b, 0.5 * tol, depth + 1, out)
    }

    /// Phase behaviour of one branch on [a,b], sampled at Chebyshev points.
    fn classify(&self, sig: f64, a: f64, b: f64) -> PhaseClass {
        let nodes = &cheb(LEVIN_HI).nodes;
        let mut min_abs = f64::INFINITY;
        let (mut pos, mut neg) = (false, false);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &x in nodes.iter() {
            let t = sig * (0.5 * (a + b) + 0.5 * (b - a) * x);
            let d = sig * self.g.phase_derivative(t);
            let p = self.g.phase(t);
            min_abs = min_abs.min(d.abs());
            pos |= d > 0.0;
            neg |= d < 0.0;
            lo = lo.min(p);
            hi = hi.max(p);
        }
        if hi - lo < LEVIN_MIN_VARIATION {
            PhaseClass::Small
        } else if pos != neg && min_abs * (b - a) >= PI {
            PhaseClass::Monotone
        } else {
            PhaseClass::Stationary
        }
    }

    /// Levin collocation for σ g(σs)/s on [a,b] with n nodes.
    fn levin(&mut self, sig: f64, a: f64, b: f64, n: usize) -> Option<Vec<Complex64>> {
        let cb = cheb(n);
        let scale = 2.0 / (b - a);
        let mut mat = vec![Complex64::new(0.0, 0.0); n * n];
        let mut rhs = vec![Complex64::new(0.0, 0.0); n * self.d];
        for i in 0..n {
            let s = 0.5 * (a + b) + 0.5 * (b - a) * cb.nodes[i];
            let t = sig * s;
            let dphi = sig * self.g.phase_derivative(t);
            for j in 0..n {
                mat[i * n + j] = Complex64::new(cb.diff[i * n + j] * scale, 0.0);
            }
            mat[i * n + i] -= I * dphi;
            self.g.amplitude(t, &mut self.amp);
            self.evals += 1;
            for k in 0..self.d {
                rhs[i * self.d + k] = self.amp[k] * (sig / s);
            }
        }
        if !lu_solve(&mut mat, &mut rhs, n, self.d) {
            return None;
        }
        // Node 0 is s = b, node n−1 is s = a.
        let eb = Complex64::from_polar(1.0, -self.g.phase(sig * b));
        let ea = Complex64::from_polar(1.0, -self.g.phase(sig * a));
        let v: Vec<Complex64> = (0..self.d)
            .map(|k| rhs[k] * eb - rhs[(n - 1) * self.d + k] * ea)
            .collect();
        if v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Some(v)
        } else {
            None
        }
    }

    /// Levin on one branch with bisection when the two orders disagree.
    fn levin_adaptive(&mut self, sig: f64, a: f64, b: f64, tol: f64, depth: usize, out: &mut [Complex64]) {
        if let (Some(hi), Some(lo)) = (self.levin(sig, a, b, LEVIN_HI), self.levin(sig, a, b, LEVIN_LO)) {
            let err = hi.iter().zip(&lo).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            let floor = LEVIN_ROUNDOFF * hi.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if err <= tol.max(floor) || depth >= MAX_DEPTH {
                if err > tol.max(floor) {
                    self.failed = true;
                }
                self.error += err;
                for k in 0..self.d {
                    out[k] += hi[k];
                }
                return;
            }
        }
        let m = 0.5 * (a + b);
        for (l, r) in [(a, m), (m, b)] {
            match self.classify(sig, l, r) {
                PhaseClass::Monotone => self.levin_adaptive(sig, l, r, 0.5 * tol, depth + 1, out),
                _ => {
                    self.gk_adaptive(Mode::Branch(sig), l, r, 0.5 * tol, depth + 1, out);
                }
            }
        }
    }

    /// Integrates the paired integrand over [a,b] ⊂ (0,∞); returns ∫|A|ds/s estimate.
    fn interval(&mut self, a: f64, b: f64, tol: f64, panels: usize, depth: usize, out: &mut [Complex64]) -> f64 {
        let cp = self.classify(1.0, a, b);
        let cm = self.classify(-1.0, a, b);
        use PhaseClass::*;
        match (cp, cm) {
            (Small, Small) => {
                let r = (b / a).powf(1.0 / panels as f64);
                let mut env = 0.0;
                let mut lo = a;
                for p in 0..panels {
                    let hi = if p + 1 == panels { b } else { lo * r };
                    env += self.gk_adaptive(Mode::Paired, lo, hi, tol / panels as f64, depth, out);
                    lo = hi;
                }
                env
            }
            (Stationary, _) | (_, Stationary) if depth < MAX_DEPTH => {
                let m = 0.5 * (a + b);
                let p = (panels / 2).max(1);
                self.interval(a, m, 0.5 * tol, p, depth + 1, out)
                    + self.interval(m, b, 0.5 * tol, p, depth + 1, out)
            }
            _ => {
                let mut env = 0.0;
                for (sig, cls) in [(1.0, cp), (-1.0, cm)] {
                    if cls == Monotone {
                        env += self.envelope(sig, a, b);
                        self.levin_adaptive(sig, a, b, 0.5 * tol, depth, out);
                    } else {
                        env += self.gk_adaptive(Mode::Branch(sig), a, b, 0.5 * tol, depth, out);
                    }
                }
                env
            }
        }
    }

    /// Cheap ∫_a^b |A(σs)| ds/s estimate from a few samples.
    fn envelope(&mut self, sig: f64, a: f64, b: f64) -> f64 {
        let mut m = 0.0f64;
        for x in [0.0, 0.5, 1.0] {
            let s = a * (b / a).powf(x);
            self.g.amplitude(sig * s, &mut self.amp);
            self.evals += 1;
            for v in &self.amp {
                m = m.max(v.norm());
            }
        }
        m * (b / a).ln()
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum PhaseClass {
    Small,
    Monotone,
    Stationary,
}

struct Cheb {
    nodes: Vec<f64>,
    diff: Vec<f64>,
}

fn build_cheb(n: usize) -> Cheb {
    let m = n - 1;
    let nodes: Vec<f64> = (0..n).map(|j| (PI * j as f64 / m as f64).cos()).collect();
    let c = |j: usize| if j == 0 || j == m { 2.0 } else { 1.0 };
    let mut diff = vec![0.0; n * n];
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            if i != j {
                let sgn = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let v = c(i) / c(j) * sgn / (nodes[i] - nodes[j]);
                diff[i * n + j] = v;
                row += v;
            }
        }
        // Negative-sum trick for the diagonal.
        diff[i * n + i] = -row;
    }
    Cheb { nodes, diff }
}

fn cheb(n: usize) -> &'static Cheb {
    static LO: OnceLock<Cheb> = OnceLock::new();
    static HI: OnceLock<Cheb> = OnceLock::new();
    match n {
        LEVIN_LO => LO.get_or_init(|| build_cheb(LEVIN_LO)),
        LEVIN_HI => HI.get_or_init(|| build_cheb(LEVIN_HI)),
        _ => unreachable!("unsupported Chebyshev order {n}"),
    }
}

/// In-place LU with partial pivoting; solves for `nrhs` columns stored row-major.
fn lu_solve(a: &mut [Complex64], b: &mut [Complex64], n: usize, nrhs: usize) -> bool {
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].norm_sqr().total_cmp(&a[j * n + k].norm_sqr()))
            .unwrap();
        if a[p * n + k].norm_sqr() == 0.0 {
            return false;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            for j in 0..nrhs {
                b.swap(k * nrhs + j, p * nrhs + j);
            }
        }
        let piv = a[k * n + k].inv();
        for i in k + 1..n {
            let f = a[i * n + k] * piv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let v = a[k * n + j];
                a[i * n + j] -= f * v;
            }
            for j in 0..nrhs {
                let v = b[k * nrhs + j];
                b[i * nrhs + j] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        let piv = a[k * n + k].inv();
        for j in 0..nrhs {
            let mut s = b[k * nrhs + j];
            for m in k + 1..n {
                s -= a[k * n + m] * b[m * nrhs + j];
            }
            b[k * nrhs + j] = s * piv;
        }
    }
    true
}

/// Consecutive small shells required before a sweep stops early.
const QUIET_SHELLS: usize = 2;

/// p.v.∫_{ε<|t|<R} A(t)e^{-iφ(t)} dt/t, component-wise for vector amplitudes.
///
/// Shells are swept outward from t = 1 and inward from t = 1; a sweep stops at
/// its cutoff or once two consecutive shells carry amplitude mass below the
/// per-shell tolerance. Reaching a cutoff is not an error: the result is the
/// truncated integral. Failure of the adaptive rules inside a shell is reported
/// as [`Error::ToleranceNotMet`].
pub fn pv_integrate<G: OscillatoryIntegrand + ?Sized>(g: &G, spec: &PVSpec) -> Result<QuadResult> {
    spec.validate()?;
    let mut eng = Engine::new(g);
    let d = eng.d;
    let shell_tol = spec.abs_tol / 16.0;
    let mut outward = vec![Complex64::new(0.0, 0.0); d];
    let mut inward = vec![Complex64::new(0.0, 0.0); d];
    let sweep = |eng: &mut Engine<G>, acc: &mut Vec<Complex64>, up: bool| {
        let mut quiet = 0;
        let mut k: i32 = if up { 0 } else { -1 };
        loop {
            let (mut a, mut b) = (2f64.powi(k), 2f64.powi(k + 1));
            let last = if up { b >= spec.r } else { a <= spec.eps };
            a = a.max(spec.eps);
            b = b.min(spec.r);
            if a < b {
                let running = acc.iter().map(|c| c.norm()).fold(0.0, f64::max);
                let tol = shell_tol.max(spec.rel_tol * running / 16.0);
                let mut shell = vec![Complex64::new(0.0, 0.0); d];
                let env = eng.interval(a, b, tol, spec.levels_per_octave, 0, &mut shell);
                for (s, v) in acc.iter_mut().zip(&shell) {
                    *s += v;
                }
                if env < tol {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
            }
            if last || quiet >= QUIET_SHELLS {
                break;
            }
            k += if up { 1 } else { -1 };
        }
    };
    if spec.r > 1.0 {
        sweep(&mut eng, &mut outward, true);
    }
    if spec.eps < 1.0 {
        sweep(&mut eng, &mut inward, false);
    }
    let value: Vec<Complex64> = outward.iter().zip(&inward).map(|(a, b)| a + b).collect();
    finish(eng, value)
}

fn finish<G: OscillatoryIntegrand + ?Sized>(eng: Engine<'_, G>, value: Vec<Complex64>) -> Result<QuadResult> {
    if eng.failed {
        return Err(Error::ToleranceNotMet {
            partial_re: value[0].re,
            partial_im: value[0].im,
            error_estimate: eng.error,
        });
    }
    Ok(QuadResult { value, error_estimate: eng.error, evaluations: eng.evals })
}

/// ∫_a^b A(t)e^{-iφ(t)} dt by adaptive Gauss–Kronrod, splitting panels on
/// error and whenever the phase varies by more than π.
pub fn oscillatory_segment<G: OscillatoryIntegrand + ?Sized>(g: &G, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return domain(format!("segment needs finite a < b, got [{a}, {b}]"));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let mut eng = Engine::new(g);
    let mut out = vec![Complex64::new(0.0, 0.0); eng.d];
    eng.gk_adaptive(Mode::Plain, a, b, tol, 0, &mut out);
    finish(eng, out)
}

/// Gauss–Legendre nodes and weights on [-1,1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gk_integrates_polynomials_exactly() {
        let g = FnIntegrand(|t: f64| c(t.powi(20) - 3.0 * t.powi(7), 0.0));
        let r = oscillatory_segment(&g, 0.0, 1.0, 1e-13).unwrap();
        assert!((r.scalar().re - (1.0 / 21.0 - 3.0 / 8.0)).abs() < 1e-14);
    }

    #[test]
    fn segment_examples() {
        let one = oscillatory_segment(&FnIntegrand(|_| c(1.0, 0.0)), 0.0, 1.0, 1e-12).unwrap();
        assert!((one.scalar() - c(1.0, 0.0)).norm() < 1e-14);
        let period = PhaseIntegrand {
            amplitude: |_| c(1.0, 0.0),
            phase: |t: f64| 2.0 * PI * t,
            phase_derivative: |_| 2.0 * PI,
        };
        assert!(oscillatory_segment(&period, 0.0, 1.0, 1e-12).unwrap().scalar().norm() < 1e-13);
    }

    #[test]
    fn gauss_legendre_weights() {
        for n in [1, 2, 4, 7, 16] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((m - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn tail_bounds() {
        assert!((tail_estimate(-1.0, 100.0).unwrap() - 0.01).abs() < 1e-15);
        assert!((tail_estimate(-2.0, 10.0).unwrap() - 0.005).abs() < 1e-15);
        let r = radius_for_tail(-1.5, 1e-8).unwrap();
        assert!((r - 1.5e-8f64.powf(-2.0 / 3.0)).abs() < 1e-6 * r);
        assert!((tail_estimate(-1.5, r).unwrap() - 1e-8).abs() < 1e-20);
        assert!(tail_estimate(0.0, 10.0).is_err());
        assert_eq!(PVSpec::for_exponent(-0.01).unwrap().r, 1e8);
    }

    #[test]
    fn spec_validation() {
        assert!(PVSpec::default().validate().is_ok());
        assert!(PVSpec::default().with_cutoffs(1.0, 0.5).validate().is_err());
        assert!(PVSpec { levels_per_octave: 2, ..PVSpec::default() }.validate().is_err());
        assert!(PVSpec::default().with_tolerance(2.0).validate().is_err());
    }

    #[test]
    fn levin_matches_closed_form_chirp() {
        // ∫_1^2 e^{-i 400 t} dt exactly.
        let g = PhaseIntegrand { amplitude: |_| c(1.0, 0.0), phase: |t: f64| 400.0 * t, phase_derivative: |_| 400.0 };
        let mut eng = Engine::new(&g);
        let v = eng.levin(1.0, 1.0, 2.0, LEVIN_HI).unwrap()[0];
        // Branch weight is 1/s, so compare with ∫_1^2 e^{-i400s}/s ds by GK.
        let gk = oscillatory_segment(
            &PhaseIntegrand {
                amplitude: |t: f64| c(1.0 / t, 0.0),
                phase: |t: f64| 400.0 * t,
                phase_derivative: |_| 400.0,
            },
            1.0,
            2.0,
            1e-13,
        )
        .unwrap()
        .scalar();
        assert!((v - gk).norm() < 1e-11, "{v} vs {gk}");
    }
}

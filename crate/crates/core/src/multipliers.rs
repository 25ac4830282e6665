//! The multiplier families
//!
//! * m_z(ξ) = p.v.∫ e^{-2πiξ·Γ(t)} |t|^z dt/t for curves in ℝⁿ, and
//! * m_z(ξ,η) = p.v.∫ e^{-2πi[ξt+ηγ(t)]} [1+η²γ(t)²]^z dt/t for convex plane curves,
//!
//! together with ξ∂_ξ m, η∂_η m and ξη∂²_{ξη} m written in integrated-by-parts
//! form, and grid reports of their suprema.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curves::{ConvexProfile, Curve};
use crate::error::{domain, Result};
use crate::parallel::par_map;
use crate::pv_quadrature::{oscillatory_segment, pv_integrate, FnIntegrand, OscillatoryIntegrand, PVSpec};

const TWO_PI: f64 = 2.0 * PI;
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// −β ≤ Re z ≤ −η.
    Section2 { beta: f64, eta: f64 },
    /// Re z < −1.
    Section4,
    Unrestricted,
}

/// The complex parameter z of an analytic family, tagged with its validity regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParameter {
    pub re: f64,
    pub im: f64,
    pub regime: Regime,
}

impl AnalyticParameter {
    pub fn new(re: f64, im: f64, regime: Regime) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return domain("z must be finite");
        }
        let ok = match regime {
            Regime::Section2 { beta, eta } => eta > 0.0 && beta >= eta && -beta <= re && re <= -eta,
            Regime::Section4 => re < -1.0,
            Regime::Unrestricted => true,
        };
        if !ok {
            return domain(format!("z = {re}{im:+}i violates regime {regime:?}"));
        }
        Ok(Self { re, im, regime })
    }

    pub fn unrestricted(re: f64, im: f64) -> Self {
        Self { re, im, regime: Regime::Unrestricted }
    }

    pub fn section4(re: f64, im: f64) -> Result<Self> {
        Self::new(re, im, Regime::Section4)
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// t ↦ |t|^z e^{-2πiξ·Γ(t)}.
struct CurveIntegrand<'a> {
    curve: &'a Curve,
    xi: &'a [f64],
    z: Complex64,
}

impl OscillatoryIntegrand for CurveIntegrand<'_> {
    fn phase(&self, t: f64) -> f64 {
        TWO_PI * self.curve.dot(t, self.xi)
    }
    fn phase_derivative(&self, t: f64) -> f64 {
        TWO_PI * self.curve.dot_derivative(t, self.xi)
    }
    fn amplitude(&self, t: f64, out: &mut [Complex64]) {
        out[0] = if self.z == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            (self.z * t.abs().ln()).exp()
        };
    }
}

/// Default cutoffs for m_z along a homogeneous curve: R from the tail bound when
/// Re z < 0; callers must supply cutoffs otherwise.
pub fn default_curve_spec(z: &AnalyticParameter) -> Result<PVSpec> {
    if z.re < 0.0 {
        Ok(PVSpec::for_exponent(z.re)?.with_cutoffs(1e-12, PVSpec::for_exponent(z.re)?.r))
    } else {
        domain("Re z >= 0 needs explicit cutoffs")
    }
}

/// m_z(ξ) along any curve, with the given cutoffs.
pub fn m_z_curve(curve: &Curve, z: &AnalyticParameter, xi: &[f64], spec: &PVSpec) -> Result<Complex64> {
    if xi.len() != curve.dim() {
        return Err(crate::Error::Dimension { expected: curve.dim(), got: xi.len() });
    }
    let g = CurveIntegrand { curve, xi, z: z.z() };
    Ok(pv_integrate(&g, spec)?.scalar())
}

/// m_z(ξ) for homogeneous and two-sided homogeneous curves.
pub fn m_z_homogeneous(curve: &Curve, z: &AnalyticParameter, xi: &[f64], spec: &PVSpec) -> Result<Complex64> {
    if matches!(curve, Curve::ConvexPlane { .. }) {
        return domain("m_z_homogeneous needs a homogeneous or two-sided curve");
    }
    if matches!(z.regime, Regime::Section4) {
        return domain("the |t|^z family is not defined for Re z < -1 near t = 0");
    }
    m_z_curve(curve, z, xi, spec)
}

/// Frozen envelope for the bound reports of γ = sgn(t)t².
pub const DEFAULT_C0: f64 = 64.0;

/// Frozen envelope for |m_z| on [−8,8]².
pub const M_ENVELOPE: f64 = 6.0;

/// Number of integrals computed in one pass for the convex family.
const CONVEX_TERMS: usize = 8;

/// Amplitudes sharing the phase 2π(ξt+ηγ(t)); the last five carry a factor t so
/// that the dt/t engine returns ordinary ∫ dt integrals.
struct ConvexIntegrand {
    gamma: ConvexProfile,
    z: Complex64,
    xi: f64,
    eta: f64,
    full: bool,
}

impl OscillatoryIntegrand for ConvexIntegrand {
    fn dim(&self) -> usize {
        if self.full {
            CONVEX_TERMS
        } else {
            1
        }
    }
    fn phase(&self, t: f64) -> f64 {
        TWO_PI * (self.xi * t + self.eta * self.gamma.value(t))
    }
    fn phase_derivative(&self, t: f64) -> f64 {
        TWO_PI * (self.xi + self.eta * self.gamma.d1(t))
    }
    fn amplitude(&self, t: f64, out: &mut [Complex64]) {
        let g = self.gamma.value(t);
        let u = self.eta * g;
        let w = 1.0 + u * u;
        let wz = (self.z * w.ln()).exp();
        out[0] = wz;
        if !self.full {
            return;
        }
        let wz1 = wz / w;
        let wz2 = wz1 / w;
        let tg1 = t * self.eta * self.gamma.d1(t);
        out[1] = wz * u;
        out[2] = wz1 * (u * u);
        out[3] = wz * tg1;
        out[4] = wz1 * (u * tg1);
        out[5] = wz * (u * tg1);
        out[6] = wz1 * (u * u * tg1);
        out[7] = wz2 * (u * u * u * tg1);
    }
}

/// The values that determine m and its three scaled derivatives at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexEvaluation {
    pub xi: f64,
    pub eta: f64,
    pub m: Complex64,
    pub xi_dxi: Complex64,
    pub eta_deta: Complex64,
    pub xi_eta_mixed: Complex64,
    /// The eight terms of ξη∂²m in order: boundary, three integrals, boundary,
    /// three integrals.
    pub mixed_terms: [Complex64; 8],
    /// Bare integrals ∫e^{-iφ}ηγ'W^z dt and ∫e^{-iφ}η⁴γ³γ'W^{z−2} dt.
    pub eta_gamma_prime_integral: Complex64,
    pub sixth_bare_integral: Complex64,
    /// Magnitude of the boundary terms retained at the finite cutoff R.
    pub boundary_magnitude: f64,
    pub cutoff: f64,
    pub error_estimate: f64,
}

/// Outer cutoff for the convex family: where [1+η²γ²]^{Re z} drops below 1e-14,
/// capped at the spec's R.
pub fn convex_cutoff(gamma: &ConvexProfile, re_z: f64, eta: f64, cap: f64) -> f64 {
    if eta == 0.0 || re_z >= 0.0 {
        return cap;
    }
    // |η|γ(R) = target with W^{Re z} ≈ target^{2 Re z} = 1e-14.
    let target = 1e-14f64.powf(1.0 / (2.0 * re_z)) / eta.abs();
    if gamma.value(cap) <= target {
        return cap;
    }
    let (mut lo, mut hi) = (0.0f64, cap);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma.value(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi.max(1.0)
}

fn convex_spec(gamma: &ConvexProfile, z: &AnalyticParameter, eta: f64, tol: f64) -> PVSpec {
    let r = convex_cutoff(gamma, z.re, eta, 1e8);
    PVSpec::default().with_cutoffs(1e-14, r).with_tolerance(tol)
}

/// m_z(ξ,η) for a convex plane curve.
pub fn m_z_convex(gamma: &ConvexProfile, z: &AnalyticParameter, xi: f64, eta: f64, tol: f64) -> Result<Complex64> {
    let g = ConvexIntegrand { gamma: *gamma, z: z.z(), xi, eta, full: false };
    Ok(pv_integrate(&g, &convex_spec(gamma, z, eta, tol))?.scalar())
}

/// m and its scaled derivatives in one quadrature pass.
pub fn convex_evaluate(
    gamma: &ConvexProfile,
    z: &AnalyticParameter,
    xi: f64,
    eta: f64,
    tol: f64,
) -> Result<ConvexEvaluation> {
    let zc = z.z();
    let spec = convex_spec(gamma, z, eta, tol);
    let g = ConvexIntegrand { gamma: *gamma, z: zc, xi, eta, full: true };
    let res = pv_integrate(&g, &spec)?;
    let v = &res.value;
    // Boundary brackets [F e^{-iφ}]_{-R}^{R}.
    let r = spec.r;
    let bracket = |f: &dyn Fn(f64) -> Complex64| {
        let at = |t: f64| f(t) * Complex64::from_polar(1.0, -g.phase(t));
        at(r) - at(-r)
    };
    let wz = |t: f64| {
        let u = eta * gamma.value(t);
        (zc * (1.0 + u * u).ln()).exp()
    };
    let b0 = bracket(&|t| wz(t));
    let b1 = bracket(&|t| wz(t) * (eta * gamma.value(t)));
    let b2 = bracket(&|t| {
        let u = eta * gamma.value(t);
        wz(t) * (u * u) / (1.0 + u * u)
    });
    let xi_dxi = b0 + 2.0 * PI * I * v[3] - 2.0 * zc * v[4];
    let eta_deta = -2.0 * PI * I * v[1] + 2.0 * zc * v[2];
    let terms = [
        -2.0 * PI * I * b1,
        4.0 * PI * PI * v[5],
        2.0 * PI * I * v[3],
        4.0 * PI * I * zc * v[6],
        2.0 * zc * b2,
        4.0 * PI * I * zc * v[6],
        -4.0 * zc * v[4],
        -4.0 * zc * (zc - 1.0) * v[7],
    ];
    let mixed = terms.iter().sum();
    Ok(ConvexEvaluation {
        xi,
        eta,
        m: v[0],
        xi_dxi,
        eta_deta,
        xi_eta_mixed: mixed,
        mixed_terms: terms,
        eta_gamma_prime_integral: v[3],
        sixth_bare_integral: v[7],
        boundary_magnitude: b0.norm().max(b1.norm()).max(b2.norm()),
        cutoff: r,
        error_estimate: res.error_estimate,
    })
}

/// ∂m/∂ξ from the integrated-by-parts form (ξ ≠ 0).
pub fn dm_dxi(gamma: &ConvexProfile, z: &AnalyticParameter, xi: f64, eta: f64, tol: f64) -> Result<Complex64> {
    if xi == 0.0 {
        return domain("dm_dxi is recovered from ξ∂_ξ m and needs ξ ≠ 0");
    }
    Ok(convex_evaluate(gamma, z, xi, eta, tol)?.xi_dxi / xi)
}

/// ∂m/∂η from the two-term representation (η ≠ 0).
pub fn dm_deta(gamma: &ConvexProfile, z: &AnalyticParameter, xi: f64, eta: f64, tol: f64) -> Result<Complex64> {
    if eta == 0.0 {
        return domain("dm_deta is recovered from η∂_η m and needs η ≠ 0");
    }
    Ok(convex_evaluate(gamma, z, xi, eta, tol)?.eta_deta / eta)
}

/// ∂²m/∂ξ∂η from the eight-term representation (ξη ≠ 0).
pub fn d2m_dxideta(gamma: &ConvexProfile, z: &AnalyticParameter, xi: f64, eta: f64, tol: f64) -> Result<Complex64> {
    if xi == 0.0 || eta == 0.0 {
        return domain("d2m_dxideta needs ξη ≠ 0");
    }
    Ok(convex_evaluate(gamma, z, xi, eta, tol)?.xi_eta_mixed / (xi * eta))
}

/// The point t₀ > 0 with |η|γ(t₀) = 1.
pub fn t0_split(gamma: &ConvexProfile, eta: f64) -> Result<f64> {
    if eta == 0.0 {
        return domain("t0 is undefined for η = 0");
    }
    let target = 1.0 / eta.abs();
    let mut hi = 1.0;
    while gamma.value(hi) < target {
        hi *= 2.0;
        if hi > 1e300 {
            return domain("γ does not reach 1/|η|");
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma.value(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The two pieces of η∂_η m split at t₀, each as (inner |t| < t₀, outer |t| > t₀).
#[derive(Debug, Clone, PartialEq)]
pub struct EtaDerivativeSplit {
    pub t0: f64,
    pub first_inner: Complex64,
    pub first_outer: Complex64,
    pub second_inner: Complex64,
    pub second_outer: Complex64,
}

impl EtaDerivativeSplit {
    pub fn total(&self) -> Complex64 {
        self.first_inner + self.first_outer + self.second_inner + self.second_outer
    }
}

pub fn eta_deta_split(
    gamma: &ConvexProfile,
    z: &AnalyticParameter,
    xi: f64,
    eta: f64,
    tol: f64,
) -> Result<EtaDerivativeSplit> {
    let t0 = t0_split(gamma, eta)?;
    let zc = z.z();
    let g = ConvexIntegrand { gamma: *gamma, z: zc, xi, eta, full: true };
    let outer_r = convex_cutoff(gamma, z.re, eta, 1e8).max(2.0 * t0);
    let inner = pv_integrate(&g, &PVSpec::default().with_cutoffs(1e-14, t0).with_tolerance(tol))?;
    let outer = pv_integrate(&g, &PVSpec::default().with_cutoffs(t0, outer_r).with_tolerance(tol))?;
    Ok(EtaDerivativeSplit {
        t0,
        first_inner: -2.0 * PI * I * inner.value[1],
        first_outer: -2.0 * PI * I * outer.value[1],
        second_inner: 2.0 * zc * inner.value[2],
        second_outer: 2.0 * zc * outer.value[2],
    })
}

/// |η|∫_0^{t₀} γ(t)/t dt, bounded by |η|γ(t₀) = 1 for convex γ. Computed on
/// t = t₀v², which smooths power-law behaviour of γ at 0.
pub fn inner_piece(gamma: &ConvexProfile, eta: f64, tol: f64) -> Result<f64> {
    let t0 = t0_split(gamma, eta)?;
    let g = *gamma;
    let f = FnIntegrand(move |v: f64| {
        Complex64::new(if v == 0.0 { 0.0 } else { 2.0 * g.value(t0 * v * v) / v }, 0.0)
    });
    Ok(eta.abs() * oscillatory_segment(&f, 0.0, 1.0, tol / eta.abs())?.scalar().re)
}

/// ∫_ℝ (1+u²)^{s} du = √π Γ(−s−½)/Γ(−s) for s < −½, by quadrature in u on
/// [0,1] and, for u > 1, on u = w^{−m} with m chosen so the integrand
/// m·w^k(1+w^{2m})^s is a polynomial times a smooth factor near w = 0.
pub fn weight_integral(s: f64, tol: f64) -> Result<f64> {
    if !(s < -0.5) {
        return domain("∫(1+u²)^s du diverges for s ≥ -1/2");
    }
    let decay = -2.0 * s - 1.0;
    let k = (2.0 * decay).ceil().max(2.0) - 1.0;
    let m = (k + 1.0) / decay;
    let head = FnIntegrand(move |u: f64| Complex64::new((1.0 + u * u).powf(s), 0.0));
    let tail = FnIntegrand(move |w: f64| Complex64::new(m * w.powf(k) * (1.0 + w.powf(2.0 * m)).powf(s), 0.0));
    let h = oscillatory_segment(&head, 0.0, 1.0, 0.5 * tol)?.scalar().re;
    let t = oscillatory_segment(&tail, 0.0, 1.0, 0.5 * tol)?.scalar().re;
    Ok(2.0 * (h + t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDifferenceCheck {
    pub xi: f64,
    pub eta: f64,
    /// ξ∂_ξm, η∂_ηm, ξη∂²m from the integrated-by-parts forms.
    pub analytic: [Complex64; 3],
    pub finite_difference: [Complex64; 3],
    /// |analytic − fd| / max(|analytic|, floor).
    pub relative_error: [f64; 3],
}

/// Cross-checks the three derivative representations at (ξ, η), ξη ≠ 0.
/// Central differences use steps h·2^{-k}·min(1, |coordinate|), k < levels, and
/// per quantity keep the Richardson estimate that agrees best with its coarser
/// neighbour.
pub fn finite_difference_check(
    gamma: &ConvexProfile,
    z: &AnalyticParameter,
    xi: f64,
    eta: f64,
    h: f64,
    floor: f64,
    tol: f64,
) -> Result<FiniteDifferenceCheck> {
    if xi == 0.0 || eta == 0.0 {
        return domain("finite-difference check needs ξη ≠ 0");
    }
    const LEVELS: usize = 6;
    let e = convex_evaluate(gamma, z, xi, eta, tol)?;
    let m = |a: f64, b: f64| m_z_convex(gamma, z, xi + a, eta + b, tol);
    let central = |s: f64| -> Result<[Complex64; 3]> {
        let hx = s * xi.abs().min(1.0);
        let he = s * eta.abs().min(1.0);
        let dx = (m(hx, 0.0)? - m(-hx, 0.0)?) / (2.0 * hx);
        let de = (m(0.0, he)? - m(0.0, -he)?) / (2.0 * he);
        let dm = (m(hx, he)? - m(hx, -he)? - m(-hx, he)? + m(-hx, -he)?) / (4.0 * hx * he);
        Ok([xi * dx, eta * de, xi * eta * dm])
    };
    let mut plain = Vec::with_capacity(LEVELS);
    for k in 0..LEVELS {
        plain.push(central(h * 0.5f64.powi(k as i32))?);
    }
    let rich: Vec<[Complex64; 3]> =
        plain.windows(2).map(|w| std::array::from_fn(|q| (4.0 * w[1][q] - w[0][q]) / 3.0)).collect();
    let fd: [Complex64; 3] = std::array::from_fn(|q| {
        let k = (1..rich.len())
            .min_by(|&a, &b| {
                let da = (rich[a][q] - rich[a - 1][q]).norm();
                let db = (rich[b][q] - rich[b - 1][q]).norm();
                da.total_cmp(&db)
            })
            .unwrap_or(0);
        rich[k][q]
    });
    let analytic = [e.xi_dxi, e.eta_deta, e.xi_eta_mixed];
    let relative_error = std::array::from_fn(|k| (analytic[k] - fd[k]).norm() / analytic[k].norm().max(floor));
    Ok(FiniteDifferenceCheck { xi, eta, analytic, finite_difference: fd, relative_error })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    M,
    XiDxi,
    EtaDeta,
    XiEtaMixed,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Quantity::M, Quantity::XiDxi, Quantity::EtaDeta, Quantity::XiEtaMixed];

    /// Power k of (1+|Im z|) in the bound C₀(1+|Im z|)^k.
    pub fn im_power(&self) -> i32 {
        match self {
            Quantity::M => 0,
            Quantity::XiDxi | Quantity::EtaDeta => 1,
            Quantity::XiEtaMixed => 2,
        }
    }

    pub fn pick(&self, e: &ConvexEvaluation) -> Complex64 {
        match self {
            Quantity::M => e.m,
            Quantity::XiDxi => e.xi_dxi,
            Quantity::EtaDeta => e.eta_deta,
            Quantity::XiEtaMixed => e.xi_eta_mixed,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::M => "m",
            Quantity::XiDxi => "xi_dxi",
            Quantity::EtaDeta => "eta_deta",
            Quantity::XiEtaMixed => "xi_eta_mixed",
        }
    }
}

/// Log-spaced magnitudes in [min, max] per axis, optionally in all four sign
/// quadrants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundGrid {
    pub min: f64,
    pub max: f64,
    pub per_axis: usize,
    pub all_quadrants: bool,
}

impl BoundGrid {
    /// 33 log-spaced magnitudes per axis in every sign quadrant of [1e-2, 1e2]².
    pub fn standard() -> Self {
        Self { min: 1e-2, max: 1e2, per_axis: 33, all_quadrants: true }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.per_axis;
        let mags: Vec<f64> = (0..n)
            .map(|k| {
                if n == 1 {
                    self.min
                } else {
                    (self.min.ln() + (self.max.ln() - self.min.ln()) * k as f64 / (n - 1) as f64).exp()
                }
            })
            .collect();
        let signs: &[(f64, f64)] =
            if self.all_quadrants { &[(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] } else { &[(1.0, 1.0)] };
        let mut pts = Vec::with_capacity(n * n * signs.len());
        for &(sx, se) in signs {
            for &a in &mags {
                for &b in &mags {
                    pts.push((sx * a, se * b));
                }
            }
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantity: Quantity,
    pub grid: BoundGrid,
    pub sup_abs: f64,
    pub argmax: [f64; 2],
    pub paper_bound: f64,
    pub pass: bool,
    /// Fraction of grid points evaluated within tolerance.
    pub coverage: f64,
}

/// All four reports plus the raw per-point evaluations.
#[derive(Debug, Clone)]
pub struct BoundSweep {
    pub reports: Vec<BoundReport>,
    pub evaluations: Vec<ConvexEvaluation>,
    pub failures: Vec<(f64, f64)>,
}

pub fn ml_bound_report(
    gamma: &ConvexProfile,
    z: &AnalyticParameter,
    grid: &BoundGrid,
    c0: f64,
    tol: f64,
) -> Result<BoundSweep> {
    if !matches!(z.regime, Regime::Section4) && z.re >= -1.0 {
        return domain("bound reports need Re z < -1");
    }
    let pts = grid.points();
    let results = par_map(pts.len(), |k| convex_evaluate(gamma, z, pts[k].0, pts[k].1, tol));
    let mut evaluations = Vec::with_capacity(pts.len());
    let mut failures = Vec::new();
    for (r, &p) in results.into_iter().zip(&pts) {
        match r {
            Ok(e) => evaluations.push(e),
            Err(_) => failures.push(p),
        }
    }
    let coverage = evaluations.len() as f64 / pts.len() as f64;
    let reports = Quantity::ALL
        .iter()
        .map(|q| {
            let (mut sup, mut arg) = (0.0f64, [f64::NAN, f64::NAN]);
            for e in &evaluations {
                let v = q.pick(e).norm();
                if v > sup || arg[0].is_nan() {
                    sup = v;
                    arg = [e.xi, e.eta];
                }
            }
            let bound = c0 * (1.0 + z.im.abs()).powi(q.im_power());
            BoundReport {
                quantity: *q,
                grid: grid.clone(),
                sup_abs: sup,
                argmax: arg,
                paper_bound: bound,
                pass: sup <= bound && coverage == 1.0,
                coverage,
            }
        })
        .collect();
    Ok(BoundSweep { reports, evaluations, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4(re: f64, im: f64) -> AnalyticParameter {
        AnalyticParameter::section4(re, im).unwrap()
    }

    #[test]
    fn regimes_are_enforced() {
        assert!(AnalyticParameter::section4(-0.5, 0.0).is_err());
        assert!(AnalyticParameter::new(-0.5, 1.0, Regime::Section2 { beta: 0.9, eta: 0.1 }).is_ok());
        assert!(AnalyticParameter::new(-0.05, 1.0, Regime::Section2 { beta: 0.9, eta: 0.1 }).is_err());
    }

    #[test]
    fn convex_origin_vanishes() {
        let g = ConvexProfile::Pow { exponent: 2.0 };
        let m = m_z_convex(&g, &z4(-1.5, 0.0), 0.0, 0.0, 1e-10).unwrap();
        assert!(m.norm() < 1e-12);
    }

    #[test]
    fn convex_eta_axis_is_imaginary() {
        let g = ConvexProfile::Pow { exponent: 2.0 };
        let m = m_z_convex(&g, &z4(-1.5, 0.0), 0.0, 3.0, 1e-10).unwrap();
        assert!(m.re.abs() < 1e-9 && m.im.abs() > 1e-3, "{m}");
    }

    #[test]
    fn eta_zero_derivatives() {
        let g = ConvexProfile::Pow { exponent: 2.0 };
        let e = convex_evaluate(&g, &z4(-1.5, 1.0), 0.7, 0.0, 1e-10).unwrap();
        assert!(e.eta_deta.norm() < 1e-14);
        assert!(e.xi_eta_mixed.norm() < 1e-14);
        assert!(e.xi_dxi.norm() <= 2.0 + 1e-9);
        assert!((e.m - Complex64::new(0.0, -PI)).norm() < 1e-6);
    }

    #[test]
    fn t0_and_inner_piece() {
        let g = ConvexProfile::Pow { exponent: 2.0 };
        let t0 = t0_split(&g, 4.0).unwrap();
        assert!((t0 - 0.5).abs() < 1e-12);
        // |η|∫_0^{t₀} t dt = |η|t₀²/2 = 1/2.
        assert!((inner_piece(&g, 4.0, 1e-12).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn weight_integral_closed_form() {
        // s = −1: ∫ du/(1+u²) = π; s = −2: π/2.
        assert!((weight_integral(-1.0, 1e-12).unwrap() - PI).abs() < 1e-10);
        assert!((weight_integral(-2.0, 1e-12).unwrap() - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn grid_points_cover_quadrants() {
        let g = BoundGrid { min: 1e-2, max: 1e2, per_axis: 3, all_quadrants: true };
        let p = g.points();
        assert_eq!(p.len(), 36);
        assert!(p.iter().any(|&(a, b)| a < 0.0 && b < 0.0));
        assert!((p[1].1 - 1.0).abs() < 1e-12);
    }
}

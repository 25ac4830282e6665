//! The anisotropic Littlewood–Paley system and the kernels
//! ĥ_z(ξ) = ρ(ξ)^z, K_z(x) = p.v.∫ h_z(x − Γ(t))|t|^z dt/t in the plane, with
//! numerical weighted-Hörmander and key-estimate checks.
//!
//! h_z is evaluated as the dyadic sum Σ_j 2^{j(Δ+z)} g(δ_{2^j}x) of one band
//! piece g = F⁻¹[φ̂₀ρ^z], tabulated once by FFT. The plain spectral field
//! (inverse DFT of a tapered ρ^z) is kept for comparison.

use std::f64::consts::{E, LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curves::Curve;
use crate::error::{domain, Error, Result};
use crate::fft::{fft2, freq_index};
use crate::geometry::DilationGroup;
use crate::interp::{periodic_cubic, Table2};
use crate::multipliers::{default_curve_spec, m_z_homogeneous, AnalyticParameter};
use crate::parallel::par_map;
use crate::pv_quadrature::{pv_integrate, FnIntegrand, PVSpec};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
/// Relative ρ-floor on the argument of h inside K_z.
pub const DEFAULT_FLOOR: f64 = 1e-2;
/// Largest band table, in nodes; bigger requests lose oversampling.
const MAX_TABLE: usize = 1 << 23;

fn psi(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff in the scalar ρ variable: 1 on [0,1], 0 on [2,∞), built from
/// the e^{-1/u} transition.
pub fn eta_profile(s: f64) -> f64 {
    if s <= 1.0 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        let a = psi(2.0 - s);
        a / (a + psi(s - 1.0))
    }
}

/// φ̂₀ as a function of ρ(ξ) alone.
fn phi0_of_rho(r: f64) -> f64 {
    eta_profile(r) - eta_profile(2.0 * r)
}

fn check_plane(group: &DilationGroup) -> Result<()> {
    if group.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: group.dim() });
    }
    Ok(())
}

fn cpow(base: f64, e: Complex64) -> Complex64 {
    (e * base.ln()).exp()
}

// ---------------------------------------------------------------------------
// Littlewood–Paley system

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LPSystem {
    pub group: DilationGroup,
    /// Bands |j| ≤ j_max enter the partition sum.
    pub j_max: i32,
}

impl LPSystem {
    pub fn new(group: DilationGroup, j_max: i32) -> Result<Self> {
        if j_max < 1 {
            return domain("j_max must be at least 1");
        }
        Ok(Self { group, j_max })
    }

    /// φ̂₀(ξ) = η(ρ(ξ)) − η(ρ(δ₂ξ)).
    pub fn phi_hat0(&self, xi: &[f64]) -> Result<f64> {
        let r = self.group.rho(xi)?;
        let r2 = self.group.rho_unchecked(&self.group.dilate_unchecked(2.0, xi));
        Ok(eta_profile(r) - eta_profile(r2))
    }

    /// φ̂_j(ξ) = φ̂₀(δ_{2^{-j}}ξ).
    pub fn phi_hat_j(&self, j: i32, xi: &[f64]) -> Result<f64> {
        self.phi_hat0(&self.group.dilate(2f64.powi(-j), xi)?)
    }

    pub fn chi_hat_j(&self, j: i32, xi: &[f64]) -> Result<f64> {
        Ok(self.phi_hat_j(j - 1, xi)? + self.phi_hat_j(j, xi)? + self.phi_hat_j(j + 1, xi)?)
    }

    pub fn partition_sum(&self, xi: &[f64]) -> Result<f64> {
        (-self.j_max..=self.j_max).map(|j| self.phi_hat_j(j, xi)).sum()
    }

    /// 2^{-J+1} ≤ ρ(ξ) ≤ 2^{J-1}, where the partition sum is exactly 1.
    pub fn covers(&self, xi: &[f64]) -> Result<bool> {
        let r = self.group.rho(xi)?;
        let edge = 2f64.powi(self.j_max - 1);
        Ok(r >= 1.0 / edge && r <= edge)
    }

    /// max |φ̂_j(1 − χ̂_j²)| over the points; `drop_upper` leaves φ̂_{j+1} out
    /// of χ̂_j.
    pub fn reproducing_defect(&self, j: i32, points: &[Vec<f64>], drop_upper: bool) -> Result<f64> {
        let mut worst = 0.0f64;
        for xi in points {
            let mut chi = self.phi_hat_j(j - 1, xi)? + self.phi_hat_j(j, xi)?;
            if !drop_upper {
                chi += self.phi_hat_j(j + 1, xi)?;
            }
            worst = worst.max((self.phi_hat_j(j, xi)? * (1.0 - chi * chi)).abs());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LPReport {
    pub alpha: Vec<f64>,
    pub j_max: i32,
    pub points: usize,
    pub partition_defect: f64,
    pub support_violations: usize,
    pub covariance_defect: f64,
    pub reproducing_defect: f64,
    /// Pointwise gap between the defect at j and at j+5 on the δ_{2⁵}-rescaled points.
    pub rescaled_gap: f64,
    pub control_defect: f64,
}

impl LPReport {
    pub fn pass(&self) -> bool {
        self.partition_defect <= 1e-10
            && self.support_violations == 0
            && self.covariance_defect <= 1e-12
            && self.reproducing_defect <= 1e-12
            && self.rescaled_gap <= 1e-12
            && self.control_defect > 0.1
    }
}

/// Seeded points of the covered annulus: random directions at log-uniform ρ,
/// plus points on every band edge 2^k and just either side of it.
pub fn lp_sample_points(group: &DilationGroup, j_max: i32, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = group.dim();
    let direction = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 1e-3 && norm <= 1.0 {
                return v.iter().map(|c| c / norm).collect();
            }
        }
    };
    let span = (j_max - 1) as f64;
    let mut pts = Vec::with_capacity(count);
    for k in -(j_max - 1)..=(j_max - 1) {
        for f in [1.0, 1.0 + 1e-12, 1.0 - 1e-12, 1.5] {
            let r = f * 2f64.powi(k);
            if r <= 2f64.powf(span) && r >= 2f64.powf(-span) {
                let w = direction(&mut rng);
                pts.push(group.dilate_unchecked(r, &w));
            }
        }
    }
    while pts.len() < count {
        let r = 2f64.powf(rng.gen_range(-span..span));
        let w = direction(&mut rng);
        pts.push(group.dilate_unchecked(r, &w));
    }
    pts
}

/// Partition of unity, exact support, dilation covariance and the reproducing
/// identity on seeded sample points.
pub fn lp_suite(system: &LPSystem, count: usize, seed: u64) -> Result<LPReport> {
    let g = &system.group;
    let pts = lp_sample_points(g, system.j_max, count, seed);
    let mut partition_defect = 0.0f64;
    let mut support_violations = 0;
    let mut covariance_defect = 0.0f64;
    for xi in &pts {
        if system.covers(xi)? {
            partition_defect = partition_defect.max((system.partition_sum(xi)? - 1.0).abs());
        }
        let r = g.rho(xi)?;
        for j in -system.j_max..=system.j_max {
            let v = system.phi_hat_j(j, xi)?;
            let s = 2f64.powi(j);
            if (r < 0.5 * s || r > 2.0 * s) && v != 0.0 {
                support_violations += 1;
            }
            covariance_defect = covariance_defect.max((v - phi0_of_rho(r / s)).abs());
        }
    }
    let mut reproducing_defect = 0.0f64;
    let mut rescaled_gap = 0.0f64;
    let mut control_defect = 0.0f64;
    let shifted: Vec<Vec<f64>> = pts.iter().map(|p| g.dilate_unchecked(32.0, p)).collect();
    for j in [-2, 0, 3] {
        reproducing_defect = reproducing_defect.max(system.reproducing_defect(j, &pts, false)?);
        control_defect = control_defect.max(system.reproducing_defect(j, &pts, true)?);
        for (p, q) in pts.iter().zip(&shifted) {
            let a = system.reproducing_defect(j, std::slice::from_ref(p), false)?;
            let b = system.reproducing_defect(j + 5, std::slice::from_ref(q), false)?;
            rescaled_gap = rescaled_gap.max((a - b).abs());
        }
    }
    Ok(LPReport {
        alpha: g.alpha().to_vec(),
        j_max: system.j_max,
        points: pts.len(),
        partition_defect,
        support_violations,
        covariance_defect,
        reproducing_defect,
        rescaled_gap,
        control_defect,
    })
}

// ---------------------------------------------------------------------------
// Grids and fields

/// Uniform grid x_i = −hw + i·2hw/n per axis; for even n the origin is node n/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: [f64; 2],
    pub n: [usize; 2],
}

impl GridSpec {
    pub fn square(half_width: f64, n: usize) -> Self {
        Self { half_width: [half_width; 2], n: [n; 2] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.half_width.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return domain("grid half-widths must be positive");
        }
        if self.n.iter().any(|n| *n < 8 || n % 2 != 0) {
            return domain(format!("grid sizes must be even and at least 8, got {:?}", self.n));
        }
        Ok(())
    }

    pub fn step(&self) -> [f64; 2] {
        [2.0 * self.half_width[0] / self.n[0] as f64, 2.0 * self.half_width[1] / self.n[1] as f64]
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.step();
        [-self.half_width[0] + i as f64 * h[0], -self.half_width[1] + j as f64 * h[1]]
    }

    fn table(&self, data: Vec<Complex64>) -> Table2 {
        Table2 { data, n: self.n, origin: [-self.half_width[0], -self.half_width[1]], step: self.step() }
    }
}

/// Samples of ∫ s(ξ)e^{2πix·ξ}dξ at the grid nodes, by inverse DFT of s on the
/// dual lattice ξ = k/(2hw).
fn synthesize<S>(grid: &GridSpec, symbol: S) -> Vec<Complex64>
where
    S: Fn([f64; 2]) -> Complex64 + Sync,
{
    let [n0, n1] = grid.n;
    let l = [2.0 * grid.half_width[0], 2.0 * grid.half_width[1]];
    let rows = par_map(n0, |a| {
        let k0 = freq_index(a, n0);
        (0..n1)
            .map(|b| {
                let k1 = freq_index(b, n1);
                // (−1)^k moves the origin to node n/2.
                let sign = if (k0 + k1) % 2 == 0 { 1.0 } else { -1.0 };
                symbol([k0 as f64 / l[0], k1 as f64 / l[1]]) * sign
            })
            .collect::<Vec<_>>()
    });
    let mut data: Vec<Complex64> = rows.into_iter().flatten().collect();
    fft2(&mut data, n0, n1, true);
    let scale = 1.0 / (l[0] * l[1]);
    data.iter_mut().for_each(|v| *v *= scale);
    data
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelTag {
    #[serde(rename = "h_z")]
    Hz,
    #[serde(rename = "K_z")]
    Kz,
    #[serde(rename = "phi0_conv_Kz")]
    Phi0ConvKz,
}

/// High-frequency taper applied to a spectral field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Taper {
    /// The symbol is multiplied by η(2ρ(ξ)/rho_edge).
    pub rho_edge: f64,
    pub dc_zeroed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelField {
    pub grid: GridSpec,
    pub tag: KernelTag,
    pub z: AnalyticParameter,
    pub alpha: Vec<f64>,
    pub method: String,
    pub taper: Option<Taper>,
    /// Cell whose value was replaced by 0 because the kernel is singular there.
    pub origin_cell: Option<[usize; 2]>,
    #[serde(skip)]
    pub values: Vec<Complex64>,
}

impl KernelField {
    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n[1] + j]
    }

    /// Bicubic interpolation; 0 outside the grid.
    pub fn interpolate(&self, x: [f64; 2]) -> Complex64 {
        self.grid.table(self.values.clone()).eval(x)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x1,x2,re,im\n");
        for i in 0..self.grid.n[0] {
            for j in 0..self.grid.n[1] {
                let p = self.grid.point(i, j);
                let v = self.value(i, j);
                s.push_str(&format!("{},{},{},{}\n", p[0], p[1], v.re, v.im));
            }
        }
        s
    }

    fn fill<F>(grid: &GridSpec, f: F) -> (Vec<Complex64>, Option<[usize; 2]>)
    where
        F: Fn([f64; 2]) -> Complex64 + Sync,
    {
        let vals: Vec<Complex64> = par_map(grid.len(), |k| f(grid.point(k / grid.n[1], k % grid.n[1])));
        let mut origin = None;
        let vals = vals
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                if v.is_finite() {
                    v
                } else {
                    origin = Some([k / grid.n[1], k % grid.n[1]]);
                    ZERO
                }
            })
            .collect();
        (vals, origin)
    }
}

// ---------------------------------------------------------------------------
// h_z

/// Table for the band piece g = F⁻¹[φ̂₀ρ^z]: square box of the given
/// half-width, sampled with `oversample` nodes per Nyquist period of the
/// highest frequency 2^{α_a} on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandTable {
    pub half_width: f64,
    pub oversample: f64,
    /// The resummation cutoff Φ falls from 1 to 0 over ρ ∈ [1, 1 + transition].
    pub transition: f64,
}

impl BandTable {
    /// Φ(ρ) − Φ(2ρ); Σ_j of its 2^j-dilates is 1 for any transition width.
    pub fn piece(&self, r: f64) -> f64 {
        let phi = |s: f64| eta_profile(1.0 + (s - 1.0) / self.transition);
        phi(r) - phi(2.0 * r)
    }
}

impl Default for BandTable {
    fn default() -> Self {
        Self { half_width: 12.0, oversample: 6.0, transition: 3.0 }
    }
}

/// h_z as Σ_j 2^{j(Δ+z)} g(δ_{2^j}x) with the j → −∞ tail summed in closed form.
#[derive(Debug, Clone)]
pub struct HzKernel {
    group: DilationGroup,
    z: AnalyticParameter,
    degree: Complex64,
    table: Table2,
    g0: Complex64,
    j_span: i32,
    /// Table half-widths, and the range of max_a |y_a|/hw_a over which terms are
    /// cut off smoothly.
    window: ([f64; 2], f64, f64),
    pub band: BandTable,
    /// max |g| on the outer ring of the table over max |g|.
    pub edge_ratio: f64,
}

impl HzKernel {
    pub fn new(group: &DilationGroup, z: &AnalyticParameter, band: BandTable) -> Result<Self> {
        check_plane(group)?;
        let delta = group.delta_cap();
        if !(z.re > -delta) {
            return domain(format!("h_z needs Re z > -Δ = {}, got {}", -delta, z.re));
        }
        if !(band.half_width >= 2.0 && band.oversample >= 1.0 && band.transition >= 0.5) {
            return domain("band table needs half_width >= 2, oversample >= 1 and transition >= 1/2");
        }
        let a = group.alpha();
        let hw = [band.half_width; 2];
        let top = 1.0 + band.transition;
        let mut n = [0, 1].map(|i| {
            let want = 4.0 * hw[i] * band.oversample * top.powf(a[i]);
            (want.ceil() as usize).next_power_of_two()
        });
        while n[0] * n[1] > MAX_TABLE {
            let k = if n[0] >= n[1] { 0 } else { 1 };
            n[k] /= 2;
        }
        let grid = GridSpec { half_width: hw, n };
        let zc = z.z();
        let g = group.clone();
        let cap = [top.powf(a[0]), top.powf(a[1])];
        let data = synthesize(&grid, |xi| {
            if xi[0].abs() > cap[0] || xi[1].abs() > cap[1] {
                return ZERO;
            }
            let r = g.rho_unchecked(&xi);
            let p = band.piece(r);
            if p == 0.0 {
                ZERO
            } else {
                cpow(r, zc) * p
            }
        });
        let peak = data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut edge = 0.0f64;
        for i in 0..n[0] {
            for j in 0..n[1] {
                if i < 2 || j < 2 || i + 2 >= n[0] || j + 2 >= n[1] {
                    edge = edge.max(data[i * n[1] + j].norm());
                }
            }
        }
        let g0 = data[(n[0] / 2) * n[1] + n[1] / 2];
        let re_deg = delta + z.re;
        Ok(Self {
            group: group.clone(),
            z: *z,
            degree: Complex64::new(delta, 0.0) + zc,
            table: grid.table(data),
            g0,
            j_span: (55.0 / re_deg).ceil() as i32,
            window: (hw, 0.6, 1.0 - 3.0 * (grid.step()[0] / hw[0]).max(grid.step()[1] / hw[1])),
            band,
            edge_ratio: edge / peak,
        })
    }

    pub fn group(&self) -> &DilationGroup {
        &self.group
    }

    pub fn z(&self) -> &AnalyticParameter {
        &self.z
    }

    /// Δ + z, the homogeneity degree of 1/h_z.
    pub fn degree(&self) -> Complex64 {
        self.degree
    }

    /// The band piece g itself (0 outside the table).
    pub fn band_piece(&self, x: [f64; 2]) -> Complex64 {
        self.table.eval(x)
    }

    /// h_z(x); infinite at the origin.
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        let a = self.group.alpha();
        let scale = x[0].abs().powf(1.0 / a[0]).max(x[1].abs().powf(1.0 / a[1]));
        if scale == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        let j0 = -(scale.log2().floor() as i32) - self.j_span;
        let q = (self.degree * LN_2).exp();
        let mut w = (self.degree * (j0 as f64 * LN_2)).exp();
        let mut acc = self.g0 * w / (q - 1.0);
        let (hw, inner, outer) = self.window;
        let mut j = j0;
        loop {
            let y = [x[0] * (j as f64 * a[0]).exp2(), x[1] * (j as f64 * a[1]).exp2()];
            let m = (y[0] / hw[0]).abs().max((y[1] / hw[1]).abs());
            if m >= outer {
                break;
            }
            let cut = if m <= inner { 1.0 } else { eta_profile(1.0 + (m - inner) / (outer - inner)) };
            acc += w * self.table.eval(y) * cut;
            w *= q;
            j += 1;
        }
        acc
    }
}

/// Closed form of h_z for the isotropic plane: π^{-z-1}Γ((2+z)/2)/Γ(−z/2)·|x|^{-2-z},
/// given the two Gamma values.
pub fn isotropic_hz(z: Complex64, gamma_num: Complex64, gamma_den: Complex64, x: [f64; 2]) -> Complex64 {
    let r = x[0].hypot(x[1]);
    cpow(PI, -z - 1.0) * gamma_num / gamma_den * cpow(r, -z - 2.0)
}

/// h_z as an inverse DFT of ρ^z on one grid, DC cell zeroed and the top
/// octave tapered. Values outside the annulus [r_in, r_out] come from the
/// homogeneity h(y) = λ^{Δ+z}h(δ_λy).
#[derive(Debug, Clone)]
pub struct SpectralHz {
    group: DilationGroup,
    degree: Complex64,
    table: Table2,
    pub field: KernelField,
    pub r_in: f64,
    pub r_out: f64,
}

impl SpectralHz {
    pub fn new(group: &DilationGroup, z: &AnalyticParameter, grid: &GridSpec) -> Result<Self> {
        check_plane(group)?;
        grid.validate()?;
        if !(z.re > -group.delta_cap()) {
            return domain(format!("h_z needs Re z > -Δ, got {}", z.re));
        }
        let a = group.alpha();
        let h = grid.step();
        let nyquist = [0, 1].map(|i| grid.n[i] as f64 / (4.0 * grid.half_width[i]));
        let rho_edge = nyquist[0].powf(1.0 / a[0]).min(nyquist[1].powf(1.0 / a[1]));
        let zc = z.z();
        let g = group.clone();
        let values = synthesize(grid, |xi| {
            let r = g.rho_unchecked(&xi);
            if r == 0.0 {
                return ZERO;
            }
            let t = eta_profile(2.0 * r / rho_edge);
            if t == 0.0 {
                ZERO
            } else {
                cpow(r, zc) * t
            }
        });
        let r_in = [0, 1].map(|i| (4.0 * h[i]).powf(1.0 / a[i]));
        let r_out = [0, 1].map(|i| (0.5 * grid.half_width[i]).powf(1.0 / a[i]));
        let field = KernelField {
            grid: *grid,
            tag: KernelTag::Hz,
            z: *z,
            alpha: a.to_vec(),
            method: "spectral".into(),
            taper: Some(Taper { rho_edge, dc_zeroed: true }),
            origin_cell: None,
            values,
        };
        Ok(Self {
            group: group.clone(),
            degree: Complex64::new(group.delta_cap(), 0.0) + zc,
            table: grid.table(field.values.clone()),
            field,
            r_in: r_in[0].max(r_in[1]),
            r_out: r_out[0].min(r_out[1]),
        })
    }

    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        let r = self.group.rho_unchecked(&x);
        if r == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        let lam = if r < self.r_in {
            self.r_in / r
        } else if r > self.r_out {
            self.r_out / r
        } else {
            return self.table.eval(x);
        };
        let y = self.group.dilate_unchecked(lam, &x);
        cpow(lam, self.degree) * self.table.eval([y[0], y[1]])
    }
}

/// Source of h_z values for K_z.
#[derive(Debug, Clone)]
pub enum HzEvaluator {
    LpSum(HzKernel),
    Spectral(SpectralHz),
}

impl HzEvaluator {
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        match self {
            HzEvaluator::LpSum(h) => h.eval(x),
            HzEvaluator::Spectral(h) => h.eval(x),
        }
    }

    pub fn group(&self) -> &DilationGroup {
        match self {
            HzEvaluator::LpSum(h) => &h.group,
            HzEvaluator::Spectral(h) => &h.group,
        }
    }

    pub fn degree(&self) -> Complex64 {
        match self {
            HzEvaluator::LpSum(h) => h.degree,
            HzEvaluator::Spectral(h) => h.degree,
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            HzEvaluator::LpSum(_) => "lp_sum",
            HzEvaluator::Spectral(_) => "spectral",
        }
    }
}

/// h_z sampled on a grid through the dyadic band sum.
pub fn h_z_field(h: &HzKernel, grid: &GridSpec) -> Result<KernelField> {
    grid.validate()?;
    let (values, origin_cell) = KernelField::fill(grid, |x| h.eval(x));
    Ok(KernelField {
        grid: *grid,
        tag: KernelTag::Hz,
        z: h.z,
        alpha: h.group.alpha().to_vec(),
        method: "lp_sum".into(),
        taper: None,
        origin_cell,
        values,
    })
}

/// Homogeneity defect of f under x ↦ δ_λx with f(δ_λx) = λ^{-degree}f(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomogeneityError {
    pub lambda: f64,
    pub points: usize,
    /// ‖λ^{deg}f(δ_λ·) − f‖₂ / ‖f‖₂ over the points.
    pub rms_relative: f64,
    /// Largest pointwise relative error among points with |f| ≥ 0.1·rms|f|.
    pub max_relative: f64,
}

pub fn homogeneity_error<F>(
    group: &DilationGroup,
    f: F,
    degree: Complex64,
    lambda: f64,
    points: &[[f64; 2]],
) -> HomogeneityError
where
    F: Fn([f64; 2]) -> Complex64 + Sync,
{
    let scale = cpow(lambda, degree);
    let pairs = par_map(points.len(), |k| {
        let x = points[k];
        let y = group.dilate_unchecked(lambda, &x);
        (f(x), scale * f([y[0], y[1]]))
    });
    let norm2: f64 = pairs.iter().map(|(a, _)| a.norm_sqr()).sum();
    let diff2: f64 = pairs.iter().map(|(a, b)| (a - b).norm_sqr()).sum();
    let rms = (norm2 / pairs.len().max(1) as f64).sqrt();
    let max_relative = pairs
        .iter()
        .filter(|(a, _)| a.norm() >= 0.1 * rms)
        .map(|(a, b)| (a - b).norm() / a.norm())
        .fold(0.0, f64::max);
    HomogeneityError {
        lambda,
        points: pairs.len(),
        rms_relative: (diff2 / norm2).sqrt(),
        max_relative,
    }
}

/// Grid nodes x with r_min ≤ ρ(x) ≤ r_max, taking every `stride`-th node per axis.
pub fn annulus_nodes(group: &DilationGroup, grid: &GridSpec, r_min: f64, r_max: f64, stride: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for i in (0..grid.n[0]).step_by(stride.max(1)) {
        for j in (0..grid.n[1]).step_by(stride.max(1)) {
            let p = grid.point(i, j);
            let r = group.rho_unchecked(&p);
            if r >= r_min && r <= r_max {
                out.push(p);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// K_z

/// K_z(x) = p.v.∫ h_z(x − Γ(t))|t|^z dt/t by paired dyadic quadrature.
#[derive(Debug, Clone)]
pub struct KzKernel {
    pub h: HzEvaluator,
    pub curve: Curve,
    pub z: AnalyticParameter,
    pub spec: PVSpec,
    pub floor: f64,
}

impl KzKernel {
    pub fn new(h: HzEvaluator, curve: Curve, z: &AnalyticParameter) -> Result<Self> {
        match curve.group() {
            Some(g) if g.alpha() == h.group().alpha() => {}
            _ => return domain("K_z needs a homogeneous curve of the same dilation group as h_z"),
        }
        if !(z.re > -1.0 && z.re < 0.0) {
            return domain(format!("K_z needs -1 < Re z < 0, got {}", z.re));
        }
        let expect = h.degree() - h.group().delta_cap();
        if (expect - z.z()).norm() > 1e-12 {
            return domain("h_z was built for a different z");
        }
        let spec = PVSpec { eps: 1e-20, r: 1e6, levels_per_octave: 4, abs_tol: 1e-6, rel_tol: 1e-4 };
        Ok(Self { h, curve, z: *z, spec, floor: DEFAULT_FLOOR })
    }

    pub fn with_spec(mut self, spec: PVSpec) -> Self {
        self.spec = spec;
        self
    }

    /// Arguments y of h with ρ(y) < floor·ρ(x) are pushed out to that sphere.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn eval(&self, x: [f64; 2]) -> Result<Complex64> {
        let z = self.z.z();
        let (curve, h) = (&self.curve, &self.h);
        let group = h.group();
        let r_min = self.floor * group.rho(&x)?;
        let f = FnIntegrand(|t: f64| {
            let mut g = [0.0; 2];
            curve.eval_into(t, &mut g);
            let mut y = [x[0] - g[0], x[1] - g[1]];
            if r_min > 0.0 {
                let r = group.rho_unchecked(&y);
                if r < r_min {
                    let v = group.dilate_unchecked(r_min / r.max(f64::MIN_POSITIVE), &y);
                    y = [v[0], v[1]];
                }
            }
            h.eval(y) * (z * t.abs().ln()).exp()
        });
        match pv_integrate(&f, &self.spec) {
            Ok(r) => Ok(r.scalar()),
            // A capped panel is acceptable when the total error still meets the request.
            Err(Error::ToleranceNotMet { partial_re, partial_im, error_estimate })
                if error_estimate <= self.spec.abs_tol.max(self.spec.rel_tol * partial_re.hypot(partial_im)) =>
            {
                Ok(Complex64::new(partial_re, partial_im))
            }
            Err(e) => Err(e),
        }
    }
}

/// K_z = ρ^{-Δ}P(φ) with P tabulated at M equispaced angles of the unit
/// circle (which is the unit ρ-sphere) and interpolated periodically.
#[derive(Debug, Clone, Serialize)]
pub struct KzProfile {
    pub group: DilationGroup,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl KzProfile {
    pub fn build(kz: &KzKernel, angles: usize) -> Result<Self> {
        if angles < 8 {
            return domain("profile needs at least 8 angles");
        }
        let vals = par_map(angles, |k| {
            let phi = 2.0 * PI * k as f64 / angles as f64;
            kz.eval([phi.cos(), phi.sin()])
        });
        let vals: Vec<Complex64> = vals.into_iter().collect::<Result<_>>()?;
        Ok(Self {
            group: kz.h.group().clone(),
            re: vals.iter().map(|v| v.re).collect(),
            im: vals.iter().map(|v| v.im).collect(),
        })
    }

    /// Twice as many angles, reusing the existing nodes.
    pub fn refined(&self, kz: &KzKernel) -> Result<Self> {
        let m = self.re.len();
        let odd = par_map(m, |k| {
            let phi = PI * (2 * k + 1) as f64 / m as f64;
            kz.eval([phi.cos(), phi.sin()])
        });
        let odd: Vec<Complex64> = odd.into_iter().collect::<Result<_>>()?;
        let mut re = Vec::with_capacity(2 * m);
        let mut im = Vec::with_capacity(2 * m);
        for (k, v) in odd.iter().enumerate() {
            re.extend([self.re[k], v.re]);
            im.extend([self.im[k], v.im]);
        }
        Ok(Self { group: self.group.clone(), re, im })
    }

    pub fn angles(&self) -> usize {
        self.re.len()
    }

    pub fn at_angle(&self, phi: f64) -> Complex64 {
        let pos = phi.rem_euclid(2.0 * PI) / (2.0 * PI) * self.re.len() as f64;
        Complex64::new(periodic_cubic(&self.re, pos), periodic_cubic(&self.im, pos))
    }

    /// (ρ(x), angle of δ_{1/ρ}x).
    pub fn polar(&self, x: [f64; 2]) -> (f64, f64) {
        let r = self.group.rho_unchecked(&x);
        let w = self.group.dilate_unchecked(1.0 / r, &x);
        (r, w[1].atan2(w[0]))
    }

    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        let (r, phi) = self.polar(x);
        if r == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        self.at_angle(phi) * r.powf(-self.group.delta_cap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum KzRoute {
    Direct,
    Profile { angles: usize },
}

pub fn k_z_field(kz: &KzKernel, grid: &GridSpec, route: KzRoute) -> Result<KernelField> {
    grid.validate()?;
    let (values, origin_cell) = match route {
        KzRoute::Direct => {
            let vals = par_map(grid.len(), |k| {
                let p = grid.point(k / grid.n[1], k % grid.n[1]);
                if p == [0.0, 0.0] {
                    Ok(Complex64::new(f64::INFINITY, 0.0))
                } else {
                    kz.eval(p)
                }
            });
            let vals: Vec<Complex64> = vals.into_iter().collect::<Result<_>>()?;
            KernelField::fill(grid, |x| {
                let (i, j) = (
                    ((x[0] + grid.half_width[0]) / grid.step()[0]).round() as usize,
                    ((x[1] + grid.half_width[1]) / grid.step()[1]).round() as usize,
                );
                vals[i * grid.n[1] + j]
            })
        }
        KzRoute::Profile { angles } => {
            let p = KzProfile::build(kz, angles)?;
            KernelField::fill(grid, |x| p.eval(x))
        }
    };
    Ok(KernelField {
        grid: *grid,
        tag: KernelTag::Kz,
        z: kz.z,
        alpha: kz.h.group().alpha().to_vec(),
        method: match route {
            KzRoute::Direct => format!("direct/{}", kz.h.method()),
            KzRoute::Profile { angles } => format!("profile{angles}/{}", kz.h.method()),
        },
        taper: match &kz.h {
            HzEvaluator::Spectral(s) => s.field.taper,
            HzEvaluator::LpSum(_) => None,
        },
        origin_cell,
        values,
    })
}

// ---------------------------------------------------------------------------
// Weighted Hörmander condition

/// C₀ = max(6, 3c) with c the empirical quasi-triangle constant.
pub fn hormander_c0(group: &DilationGroup, seed: u64) -> f64 {
    (3.0 * group.quasi_triangle_constant(20_000, seed)).max(6.0)
}

/// Polar grid for ∫_{ρ(x) ≥ C₀ρ(y)}: log-spaced radii over `octaves` octaves
/// from C₀ρ(y), uniform angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HormanderGrid {
    pub c0: f64,
    pub octaves: usize,
    pub per_octave: usize,
    pub angles: usize,
}

impl HormanderGrid {
    pub fn new(c0: f64) -> Self {
        Self { c0, octaves: 30, per_octave: 8, angles: 512 }
    }

    pub fn refined(&self) -> Self {
        Self { per_octave: 2 * self.per_octave, angles: 2 * self.angles, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HormanderSample {
    pub y: [f64; 2],
    pub rho_y: f64,
    pub integral: f64,
    pub ratio: f64,
    /// Captured share of the integral, from a geometric fit of the last octaves.
    pub coverage: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HormanderReport {
    pub grid: HormanderGrid,
    pub profile_angles: usize,
    pub samples: Vec<HormanderSample>,
    pub value: f64,
    pub min_coverage: f64,
}

/// Seeded y with ρ(y) log-uniform in [1/2, 2] and uniform sphere angle.
pub fn hormander_samples(group: &DilationGroup, count: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = 2f64.powf(rng.gen_range(-1.0..1.0));
            let phi = rng.gen_range(0.0..2.0 * PI);
            let y = group.dilate_unchecked(r, &[phi.cos(), phi.sin()]);
            [y[0], y[1]]
        })
        .collect()
}

/// ∫_{ρ(x)≥C₀ρ(y)} |K(x−y) − K(x)| log²(e+ρ(x)) dx / log²(e+ρ(y)) per sample, in
/// polar coordinates dx = r^{Δ−1}Σα_iω_i² dr dφ.
pub fn hormander_weighted_check(profile: &KzProfile, ys: &[[f64; 2]], grid: &HormanderGrid) -> Result<HormanderReport> {
    let g = &profile.group;
    let delta = g.delta_cap();
    if ys.is_empty() || grid.octaves < 4 || grid.per_octave < 1 || grid.angles < 8 {
        return domain("Hörmander check needs samples, at least 4 octaves and 8 angles");
    }
    // Per-angle data: ω, Jacobian weight and P(φ).
    let dphi = 2.0 * PI / grid.angles as f64;
    let ring: Vec<([f64; 2], f64, Complex64)> = (0..grid.angles)
        .map(|l| {
            let phi = (l as f64 + 0.5) * dphi;
            let w = [phi.cos(), phi.sin()];
            (w, g.alpha()[0] * w[0] * w[0] + g.alpha()[1] * w[1] * w[1], profile.at_angle(phi))
        })
        .collect();
    let ds = LN_2 / grid.per_octave as f64;
    let mut samples = Vec::with_capacity(ys.len());
    for &y in ys {
        let rho_y = g.rho(&y)?;
        if rho_y == 0.0 {
            return domain("Hörmander samples must be nonzero");
        }
        let s0 = (grid.c0 * rho_y).ln();
        let octave: Vec<f64> = par_map(grid.octaves, |o| {
            let mut acc = 0.0;
            for k in 0..grid.per_octave {
                let s = s0 + ((o * grid.per_octave + k) as f64 + 0.5) * ds;
                let r = s.exp();
                let weight = (E + r).ln().powi(2);
                let sc = [r.powf(g.alpha()[0]), r.powf(g.alpha()[1])];
                let rd = r.powf(delta);
                let mut ang = 0.0;
                for (w, jac, p) in &ring {
                    let x = [sc[0] * w[0] - y[0], sc[1] * w[1] - y[1]];
                    ang += (profile.eval(x) * rd - p).norm() * jac;
                }
                acc += ang * weight;
            }
            acc * ds * dphi
        });
        let integral: f64 = octave.iter().sum();
        let m = octave.len();
        let q = (octave[m - 1] / octave[m - 3]).sqrt();
        let tail = if q < 1.0 { octave[m - 1] * q / (1.0 - q) } else { f64::INFINITY };
        samples.push(HormanderSample {
            y,
            rho_y,
            integral,
            ratio: integral / (E + rho_y).ln().powi(2),
            coverage: integral / (integral + tail),
        });
    }
    Ok(HormanderReport {
        grid: *grid,
        profile_angles: profile.angles(),
        value: samples.iter().map(|s| s.ratio).fold(0.0, f64::max),
        min_coverage: samples.iter().map(|s| s.coverage).fold(1.0, f64::min),
        samples,
    })
}

/// Frozen envelope for the weighted Hörmander ratio at Re z = −1/2:
/// value ≤ HORMANDER_ENVELOPE·(1+|Im z|)^HORMANDER_DEGREE.
pub const HORMANDER_ENVELOPE: f64 = 64.0;
pub const HORMANDER_DEGREE: f64 = 2.0;
/// Largest relative change allowed when the profile and grid are refined.
pub const HORMANDER_REFINEMENT_TOL: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HormanderRow {
    pub z: [f64; 2],
    pub value: f64,
    pub refined_value: f64,
    pub relative_change: f64,
    pub min_coverage: f64,
    pub envelope: f64,
}

/// Hörmander ratios for several z with one refinement each, plus the
/// least-squares degree of log value against log(1+|Im z|).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HormanderSweep {
    pub alpha: Vec<f64>,
    pub c0: f64,
    pub samples: usize,
    pub seed: u64,
    pub profile_angles: usize,
    pub rows: Vec<HormanderRow>,
    pub fitted_degree: Option<f64>,
}

impl HormanderSweep {
    pub fn refinement_stable(&self) -> bool {
        self.rows.iter().all(|r| r.relative_change <= HORMANDER_REFINEMENT_TOL)
    }

    pub fn within_envelope(&self) -> bool {
        self.rows.iter().all(|r| r.value.max(r.refined_value) <= r.envelope)
    }

    pub fn polynomial_growth(&self) -> bool {
        self.fitted_degree.is_none_or(|d| d <= HORMANDER_DEGREE)
    }

    pub fn pass(&self) -> bool {
        self.refinement_stable() && self.within_envelope() && self.polynomial_growth()
    }
}

/// Runs [`hormander_weighted_check`] for each z on a profile of `angles`
/// nodes and again after doubling the profile and the polar grid.
pub fn hormander_sweep(
    group: &DilationGroup,
    zs: &[AnalyticParameter],
    samples: usize,
    seed: u64,
    angles: usize,
) -> Result<HormanderSweep> {
    let c0 = hormander_c0(group, seed);
    let ys = hormander_samples(group, samples, seed);
    let grid = HormanderGrid::new(c0);
    let mut rows = Vec::with_capacity(zs.len());
    for z in zs {
        let h = HzKernel::new(group, z, BandTable::default())?;
        let kz = KzKernel::new(HzEvaluator::LpSum(h), Curve::homogeneous(group.clone()), z)?;
        let coarse = KzProfile::build(&kz, angles)?;
        let fine = coarse.refined(&kz)?;
        let a = hormander_weighted_check(&coarse, &ys, &grid)?;
        let b = hormander_weighted_check(&fine, &ys, &grid.refined())?;
        rows.push(HormanderRow {
            z: [z.re, z.im],
            value: a.value,
            refined_value: b.value,
            relative_change: (b.value - a.value).abs() / a.value,
            min_coverage: a.min_coverage.min(b.min_coverage),
            envelope: HORMANDER_ENVELOPE * (1.0 + z.im.abs()).powf(HORMANDER_DEGREE),
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((1.0 + r.z[1].abs()).ln(), r.refined_value.ln())).collect();
    let fitted_degree = least_squares_slope(&pts);
    Ok(HormanderSweep { alpha: group.alpha().to_vec(), c0, samples, seed, profile_angles: angles, rows, fitted_degree })
}

/// Slope of the least-squares line, when the abscissae are not all equal.
fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx < 1e-12 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

// ---------------------------------------------------------------------------
// Key estimate

/// M(φ) = m_z(cos φ, sin φ): the 0-homogeneous symbol ρ^z m_z of K_z.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplierProfile {
    pub group: DilationGroup,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MultiplierProfile {
    pub fn build(curve: &Curve, z: &AnalyticParameter, angles: usize) -> Result<Self> {
        let group = curve.group().ok_or_else(|| Error::Domain("needs a homogeneous curve".into()))?.clone();
        check_plane(&group)?;
        let spec = default_curve_spec(z)?;
        let vals = par_map(angles, |k| {
            let phi = 2.0 * PI * k as f64 / angles as f64;
            m_z_homogeneous(curve, z, &[phi.cos(), phi.sin()], &spec)
        });
        let vals: Vec<Complex64> = vals.into_iter().collect::<Result<_>>()?;
        Ok(Self { group, re: vals.iter().map(|v| v.re).collect(), im: vals.iter().map(|v| v.im).collect() })
    }

    pub fn eval(&self, xi: [f64; 2]) -> Complex64 {
        let r = self.group.rho_unchecked(&xi);
        if r == 0.0 {
            return ZERO;
        }
        let w = self.group.dilate_unchecked(1.0 / r, &xi);
        let pos = w[1].atan2(w[0]).rem_euclid(2.0 * PI) / (2.0 * PI) * self.re.len() as f64;
        Complex64::new(periodic_cubic(&self.re, pos), periodic_cubic(&self.im, pos))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyBump {
    /// φ̂₀, band-limited with vanishing mean.
    Phi0,
    /// e^{-π|ξ|²}, whose mean is 1.
    Gaussian,
}

/// F⁻¹[b̂ · ρ^z m_z] on a square box of half-width hw.
pub fn key_field(profile: &MultiplierProfile, z: &AnalyticParameter, bump: KeyBump, half_width: f64, oversample: f64) -> Result<KernelField> {
    let a = profile.group.alpha();
    let n = [0, 1].map(|i| ((4.0 * half_width * oversample * 2f64.powf(a[i])).ceil() as usize).next_power_of_two());
    let grid = GridSpec { half_width: [half_width; 2], n };
    grid.validate()?;
    let g = &profile.group;
    let values = synthesize(&grid, |xi| {
        let b = match bump {
            KeyBump::Phi0 => phi0_of_rho(g.rho_unchecked(&xi)),
            KeyBump::Gaussian => (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp(),
        };
        if b == 0.0 {
            ZERO
        } else {
            profile.eval(xi) * b
        }
    });
    Ok(KernelField {
        grid,
        tag: KernelTag::Phi0ConvKz,
        z: *z,
        alpha: a.to_vec(),
        method: format!("fourier/{bump:?}").to_lowercase(),
        taper: None,
        origin_cell: None,
        values,
    })
}

/// Σ |G(x)| log²(e+ρ(x)) over the grid cells.
pub fn weighted_l1(field: &KernelField, group: &DilationGroup) -> f64 {
    let h = field.grid.step();
    let rows = par_map(field.grid.n[0], |i| {
        (0..field.grid.n[1])
            .map(|j| {
                let x = field.grid.point(i, j);
                field.value(i, j).norm() * (E + group.rho_unchecked(&x)).ln().powi(2)
            })
            .sum::<f64>()
    });
    rows.iter().sum::<f64>() * h[0] * h[1]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyEstimate {
    pub bump: KeyBump,
    pub half_width: f64,
    pub value: f64,
    pub doubled_value: f64,
    /// value on the doubled box over value.
    pub growth: f64,
    /// growth < 1.10.
    pub stable: bool,
}

pub fn key_estimate_check(
    profile: &MultiplierProfile,
    z: &AnalyticParameter,
    bump: KeyBump,
    half_width: f64,
    oversample: f64,
) -> Result<KeyEstimate> {
    let v1 = weighted_l1(&key_field(profile, z, bump, half_width, oversample)?, &profile.group);
    let v2 = weighted_l1(&key_field(profile, z, bump, 2.0 * half_width, oversample)?, &profile.group);
    let growth = v2 / v1;
    Ok(KeyEstimate { bump, half_width, value: v1, doubled_value: v2, growth, stable: growth < 1.10 })
}

// ---------------------------------------------------------------------------
// Difference decay of h_z

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub scales: Vec<f64>,
    pub differences: Vec<f64>,
    /// Least-squares slope of log D against log s.
    pub exponent: f64,
}

/// D(s) = max |h(x−y) − h(x)| over ρ(x) = 1 and ρ(y) = s (so the weight
/// ρ(x)^{Δ+Re z} is 1), sampled at `directions` angles each.
pub fn difference_decay_exponent(h: &HzKernel, directions: usize) -> DecayFit {
    let g = &h.group;
    let scales: Vec<f64> = (2..=10).map(|k| 2f64.powi(-k)).collect();
    let unit = |k: usize, shift: f64| {
        let p = 2.0 * PI * (k as f64 + shift) / directions as f64;
        [p.cos(), p.sin()]
    };
    let differences: Vec<f64> = scales
        .iter()
        .map(|&s| {
            let per = par_map(directions, |k| {
                let x = unit(k, 0.0);
                let hx = h.eval(x);
                (0..4)
                    .map(|m| {
                        let w = unit(m * directions / 4, 0.37);
                        let y = g.dilate_unchecked(s, &w);
                        (h.eval([x[0] - y[0], x[1] - y[1]]) - hx).norm()
                    })
                    .fold(0.0, f64::max)
            });
            per.into_iter().fold(0.0, f64::max)
        })
        .collect();
    let lx: Vec<f64> = scales.iter().map(|s| s.ln()).collect();
    let ly: Vec<f64> = differences.iter().map(|d| d.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    DecayFit { scales, differences, exponent: sxy / sxx }
}

//! The method of rotations in the plane: T_Ω evaluated directly and as an
//! average of directional Hilbert transforms along Γ_ω(t) = δ_t ω, −δ_{−t} ω.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::parallel::par_map;
use crate::pv_quadrature::PVSpec;
use crate::transforms::{direct_sum, hilbert_direct, relative_l2, CurveTerm, GridField};
use crate::{Curve, DilationGroup};

/// Largest |Ω(ω)+Ω(−ω)| tolerated for a function declared odd.
const PARITY_TOL: f64 = 1e-10;
/// |cancel| above this (relative to size) earns a warning.
const CANCEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
    Mixed,
}

/// Ω(θ) = c + Σ_k a_k cos kθ + b_k sin kθ on the unit circle, k = 1, 2, ….
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereFunction {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub parity: Parity,
}

impl SphereFunction {
    /// Checks the declared parity on 64 nodes.
    pub fn new(constant: f64, cos: Vec<f64>, sin: Vec<f64>, parity: Parity) -> Result<Self> {
        if !constant.is_finite() || cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return domain("Ω coefficients must be finite");
        }
        let f = Self { constant, cos, sin, parity };
        let tol = PARITY_TOL * (1.0 + f.coefficient_sum());
        match parity {
            Parity::Odd if f.parity_defect(64, 1.0) > tol => Err(Error::Validation(format!(
                "Ω declared odd but |Ω(ω)+Ω(−ω)| reaches {:e}",
                f.parity_defect(64, 1.0)
            ))),
            Parity::Even if f.parity_defect(64, -1.0) > tol => Err(Error::Validation(format!(
                "Ω declared even but |Ω(ω)−Ω(−ω)| reaches {:e}",
                f.parity_defect(64, -1.0)
            ))),
            _ => Ok(f),
        }
    }

    pub fn cos_theta() -> Self {
        Self { constant: 0.0, cos: vec![1.0], sin: vec![], parity: Parity::Odd }
    }

    pub fn constant(c: f64) -> Self {
        Self { constant: c, cos: vec![], sin: vec![], parity: Parity::Even }
    }

    /// Seeded odd polynomial a₁cos θ + b₁sin θ + a₃cos 3θ + b₃sin 3θ with
    /// coefficients uniform in [−1, 1].
    pub fn seeded_odd(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = [0.0; 4];
        for v in &mut c {
            *v = rng.gen_range(-1.0..1.0);
        }
        Self { constant: 0.0, cos: vec![c[0], 0.0, c[1]], sin: vec![c[2], 0.0, c[3]], parity: Parity::Odd }
    }

    /// "cos", "sin", "one" or "cos3".
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "cos" => Ok(Self::cos_theta()),
            "sin" => Ok(Self { constant: 0.0, cos: vec![], sin: vec![1.0], parity: Parity::Odd }),
            "cos3" => Ok(Self { constant: 0.0, cos: vec![0.0, 0.0, 1.0], sin: vec![], parity: Parity::Odd }),
            "one" => Ok(Self::constant(1.0)),
            _ => domain(format!("unknown Ω family '{name}' (cos, sin, cos3, one)")),
        }
    }

    fn coefficient_sum(&self) -> f64 {
        self.constant.abs() + self.cos.iter().chain(&self.sin).map(|c| c.abs()).sum::<f64>()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.constant;
        for (k, a) in self.cos.iter().enumerate() {
            v += a * ((k + 1) as f64 * theta).cos();
        }
        for (k, b) in self.sin.iter().enumerate() {
            v += b * ((k + 1) as f64 * theta).sin();
        }
        v
    }

    /// max |Ω(θ+π) + sign·Ω(θ)| over `nodes` equispaced angles.
    pub fn parity_defect(&self, nodes: usize, sign: f64) -> f64 {
        (0..nodes)
            .map(|l| {
                let th = 2.0 * PI * l as f64 / nodes as f64;
                (self.eval(th + PI) + sign * self.eval(th)).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn label(&self) -> String {
        let coefficient = |c: f64| if c == 1.0 { String::new() } else { format!("{c}·") };
        let mut terms = Vec::new();
        if self.constant != 0.0 {
            terms.push(format!("{}", self.constant));
        }
        for (k, a) in self.cos.iter().enumerate().filter(|(_, a)| **a != 0.0) {
            terms.push(format!("{}cos{}t", coefficient(*a), k + 1));
        }
        for (k, b) in self.sin.iter().enumerate().filter(|(_, b)| **b != 0.0) {
            terms.push(format!("{}sin{}t", coefficient(*b), k + 1));
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// Equispaced circle nodes θ_l = 2πl/n with trapezoid weight 2π/n.
fn sphere_nodes(n: usize) -> Vec<(f64, [f64; 2])> {
    (0..n)
        .map(|l| {
            let th = 2.0 * PI * l as f64 / n as f64;
            (th, [th.cos(), th.sin()])
        })
        .collect()
}

fn jacobian(group: &DilationGroup, w: [f64; 2]) -> f64 {
    let a = group.alpha();
    a[0] * w[0] * w[0] + a[1] * w[1] * w[1]
}

fn check_group(group: &DilationGroup) -> Result<()> {
    if group.dim() != 2 {
        return domain("the method of rotations is implemented in the plane");
    }
    Ok(())
}

fn check_field(f: &GridField, group: &DilationGroup) -> Result<()> {
    check_group(group)?;
    if f.shape.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: f.shape.dim() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeCancellation {
    /// ∫ Σα_iω_i²|Ω(ω)| dω.
    pub size: f64,
    /// ∫ Σα_iω_i² Ω(ω) dω.
    pub cancel: f64,
    pub nodes: usize,
}

impl SizeCancellation {
    pub fn cancels(&self) -> bool {
        self.cancel.abs() <= CANCEL_TOL * self.size.max(1.0)
    }
}

/// Size and cancellation integrals by the trapezoid rule on the circle.
pub fn check_size_cancellation(omega: &SphereFunction, group: &DilationGroup, nodes: usize) -> Result<SizeCancellation> {
    check_group(group)?;
    if nodes < 16 {
        return domain(format!("need at least 16 circle nodes, got {nodes}"));
    }
    let w = 2.0 * PI / nodes as f64;
    let (mut size, mut cancel) = (0.0, 0.0);
    for (th, om) in sphere_nodes(nodes) {
        let v = jacobian(group, om) * omega.eval(th);
        size += v.abs() * w;
        cancel += v * w;
    }
    Ok(SizeCancellation { size, cancel, nodes })
}

/// A warning when Ω fails the cancellation condition on `nodes` nodes.
pub fn cancellation_warning(omega: &SphereFunction, group: &DilationGroup, nodes: usize) -> Result<Option<String>> {
    let sc = check_size_cancellation(omega, group, nodes.max(16))?;
    Ok((!sc.cancels()).then(|| {
        format!("Ω = {} violates cancellation: ∫Σα_iω_i²Ω = {:e}; T_Ω has no principal value", omega.label(), sc.cancel)
    }))
}

/// T_Ω f(x) = ∫₀^∞∫ f(x − δ_tω)Σα_iω_i²Ω(ω) dω dt/t with `nodes` circle
/// nodes and the radial rule of the direct Hilbert transform on t ∈ [ε, R].
/// For odd Ω the ±ω nodes cancel each other near t = 0.
pub fn t_omega_direct(f: &GridField, omega: &SphereFunction, group: &DilationGroup, spec: &PVSpec, nodes: usize) -> Result<GridField> {
    check_field(f, group)?;
    if nodes < 2 || nodes % 2 == 1 {
        return domain(format!("need an even number of circle nodes so ±ω pair up, got {nodes}"));
    }
    let w = 2.0 * PI / nodes as f64;
    let mut curves = Vec::new();
    for (th, om) in sphere_nodes(nodes) {
        let weight = jacobian(group, om) * omega.eval(th) * w;
        if weight != 0.0 {
            curves.push((ray(group, om), weight));
        }
    }
    let terms: Vec<CurveTerm> = curves.iter().map(|(c, weight)| CurveTerm { curve: c, weight: *weight, one_sided: true }).collect();
    direct_sum(f, &terms, spec)
}

/// Γ_ω: δ_tω for t > 0 and δ_{−t}(−ω) for t < 0.
fn ray(group: &DilationGroup, om: [f64; 2]) -> Curve {
    Curve::TwoSided { group: group.clone(), e: om.to_vec(), f: vec![-om[0], -om[1]] }
}

/// Sphere weight used by the rotation average; `Unit` drops the Jacobian and
/// serves as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationWeight {
    Jacobian,
    Unit,
}

/// T_Ω f = ½Σ_l Σα_iω_i²Ω(ω_l)·(2π/n)·ℋ_{Γ_{ω_l}} f, each directional
/// transform computed by [`hilbert_direct`].
pub fn t_omega_rotations(
    f: &GridField,
    omega: &SphereFunction,
    group: &DilationGroup,
    n_dirs: usize,
    spec: &PVSpec,
    weight: RotationWeight,
) -> Result<GridField> {
    check_field(f, group)?;
    if n_dirs < 2 {
        return domain("need at least two directions");
    }
    let w = 2.0 * PI / n_dirs as f64;
    let dirs: Vec<(f64, [f64; 2])> = sphere_nodes(n_dirs)
        .into_iter()
        .map(|(th, om)| {
            let j = match weight {
                RotationWeight::Jacobian => jacobian(group, om),
                RotationWeight::Unit => 1.0,
            };
            (0.5 * j * omega.eval(th) * w, om)
        })
        .filter(|(c, _)| *c != 0.0)
        .collect();
    let parts = par_map(dirs.len(), |l| hilbert_direct(f, &ray(group, dirs[l].1), spec));
    let mut out = f.scaled(0.0);
    for ((c, _), part) in dirs.iter().zip(parts) {
        out = out.combine(1.0, &part?, *c)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationReport {
    pub alpha: Vec<f64>,
    pub omega: String,
    pub n_dirs: usize,
    pub direct_nodes: usize,
    pub l2_direct: f64,
    pub l2_rot: f64,
    pub rel_discrepancy: f64,
}

/// Relative L² distance between the rotation average over `n_dirs`
/// directions and the direct evaluation on `direct_nodes` circle nodes.
pub fn rotation_identity(
    f: &GridField,
    omega: &SphereFunction,
    group: &DilationGroup,
    spec: &PVSpec,
    n_dirs: usize,
    direct_nodes: usize,
    weight: RotationWeight,
) -> Result<(RotationReport, GridField, GridField)> {
    let direct = t_omega_direct(f, omega, group, spec, direct_nodes)?;
    let rot = t_omega_rotations(f, omega, group, n_dirs, spec, weight)?;
    let l2 = |g: &GridField| (g.values.iter().map(|v| v * v).sum::<f64>() * g.shape.cell_volume()).sqrt();
    let report = RotationReport {
        alpha: group.alpha().to_vec(),
        omega: omega.label(),
        n_dirs,
        direct_nodes,
        l2_direct: l2(&direct),
        l2_rot: l2(&rot),
        rel_discrepancy: relative_l2(&rot, &direct)?,
    };
    Ok((report, direct, rot))
}

/// Successive increments of the direct evaluation as R doubles twice. A
/// principal value that converges has shrinking increments; without
/// cancellation each doubling adds the same amount.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMonitor {
    pub r: f64,
    /// L² norms of T^{2R}f − T^R f and T^{4R}f − T^{2R}f.
    pub increments: [f64; 2],
    pub decay: f64,
    pub converging: bool,
}

/// Increments must at least shrink by this factor per doubling.
const TAIL_DECAY: f64 = 0.75;

pub fn tail_monitor(f: &GridField, omega: &SphereFunction, group: &DilationGroup, spec: &PVSpec, nodes: usize) -> Result<TailMonitor> {
    let at = |r: f64| t_omega_direct(f, omega, group, &spec.with_cutoffs(spec.eps, r), nodes);
    let (a, b, c) = (at(spec.r)?, at(2.0 * spec.r)?, at(4.0 * spec.r)?);
    let dist = |u: &GridField, v: &GridField| {
        (u.values.iter().zip(&v.values).map(|(x, y)| (x - y).powi(2)).sum::<f64>() * u.shape.cell_volume()).sqrt()
    };
    let increments = [dist(&b, &a), dist(&c, &b)];
    let decay = increments[1] / increments[0];
    Ok(TailMonitor { r: spec.r, increments, decay, converging: decay < TAIL_DECAY })
}

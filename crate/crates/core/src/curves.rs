//! Curves Γ: ℝ → ℝⁿ with Γ(0) = 0: homogeneous, two-sided homogeneous and
//! convex plane curves (t, γ(t)), plus grid checks of the convexity hypotheses.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::DilationGroup;

/// Odd convex profiles γ with analytic first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ConvexProfile {
    /// γ(t) = sgn(t)|t|^exponent.
    Pow { exponent: f64 },
    /// γ(t) = t e^{-1/|t|}.
    TExpInv,
}

impl ConvexProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ConvexProfile::Pow { exponent } => t.signum() * t.abs().powf(exponent) * nonzero(t),
            ConvexProfile::TExpInv => {
                if t == 0.0 {
                    0.0
                } else {
                    t * (-1.0 / t.abs()).exp()
                }
            }
        }
    }

    pub fn d1(&self, t: f64) -> f64 {
        let a = t.abs();
        match *self {
            ConvexProfile::Pow { exponent } => {
                if exponent == 1.0 {
                    1.0
                } else if a == 0.0 {
                    if exponent > 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    exponent * a.powf(exponent - 1.0)
                }
            }
            ConvexProfile::TExpInv => {
                if a == 0.0 {
                    0.0
                } else {
                    (-1.0 / a).exp() * (1.0 + 1.0 / a)
                }
            }
        }
    }

    pub fn d2(&self, t: f64) -> f64 {
        let a = t.abs();
        let s = t.signum() * nonzero(t);
        match *self {
            ConvexProfile::Pow { exponent } => {
                if exponent == 1.0 {
                    0.0
                } else if exponent == 2.0 {
                    2.0 * s
                } else {
                    s * exponent * (exponent - 1.0) * a.powf(exponent - 2.0)
                }
            }
            ConvexProfile::TExpInv => {
                if a == 0.0 {
                    0.0
                } else {
                    s * (-1.0 / a).exp() / (a * a * a)
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ConvexProfile::Pow { exponent } => format!("pow({exponent})"),
            ConvexProfile::TExpInv => "t_exp_inv".to_string(),
        }
    }
}

fn nonzero(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum Curve {
    /// Γ(t) = (sgn t |t|^{α_1}, …, sgn t |t|^{α_n}).
    Homogeneous { group: DilationGroup },
    /// Γ(t) = δ_t e for t > 0 and δ_{-t} f for t < 0.
    TwoSided { group: DilationGroup, e: Vec<f64>, f: Vec<f64> },
    /// Γ(t) = (t, γ(t)).
    ConvexPlane { gamma: ConvexProfile },
}

impl Curve {
    pub fn homogeneous(group: DilationGroup) -> Self {
        Curve::Homogeneous { group }
    }

    /// The model curve Γ(t) = (t, sgn t·t²) of the planar examples.
    pub fn model_parabola() -> Self {
        Curve::Homogeneous { group: DilationGroup::new(vec![1.0, 2.0]).unwrap() }
    }

    pub fn dim(&self) -> usize {
        match self {
            Curve::Homogeneous { group } | Curve::TwoSided { group, .. } => group.dim(),
            Curve::ConvexPlane { .. } => 2,
        }
    }

    pub fn group(&self) -> Option<&DilationGroup> {
        match self {
            Curve::Homogeneous { group } | Curve::TwoSided { group, .. } => Some(group),
            Curve::ConvexPlane { .. } => None,
        }
    }

    /// Writes Γ(t) into `out`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let a = t.abs();
        match self {
            Curve::Homogeneous { group } => {
                let s = t.signum() * nonzero(t);
                for (o, al) in out.iter_mut().zip(group.alpha()) {
                    *o = s * a.powf(*al);
                }
            }
            Curve::TwoSided { group, e, f } => {
                let v = if t >= 0.0 { e } else { f };
                for ((o, al), c) in out.iter_mut().zip(group.alpha()).zip(v) {
                    *o = if t == 0.0 { 0.0 } else { a.powf(*al) * c };
                }
            }
            Curve::ConvexPlane { gamma } => {
                out[0] = t;
                out[1] = gamma.value(t);
            }
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out);
        out
    }

    /// Writes Γ'(t) into `out` (t ≠ 0 for exponents below 1).
    pub fn derivative_into(&self, t: f64, out: &mut [f64]) {
        let a = t.abs();
        match self {
            Curve::Homogeneous { group } => {
                for (o, al) in out.iter_mut().zip(group.alpha()) {
                    *o = al * a.powf(al - 1.0);
                }
            }
            Curve::TwoSided { group, e, f } => {
                let (v, s) = if t >= 0.0 { (e, 1.0) } else { (f, -1.0) };
                for ((o, al), c) in out.iter_mut().zip(group.alpha()).zip(v) {
                    *o = s * al * a.powf(al - 1.0) * c;
                }
            }
            Curve::ConvexPlane { gamma } => {
                out[0] = 1.0;
                out[1] = gamma.d1(t);
            }
        }
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.derivative_into(t, &mut out);
        out
    }

    /// ξ·Γ(t) without allocating.
    pub fn dot(&self, t: f64, xi: &[f64]) -> f64 {
        let a = t.abs();
        match self {
            Curve::Homogeneous { group } => {
                let s = t.signum() * nonzero(t);
                s * group.alpha().iter().zip(xi).map(|(al, x)| a.powf(*al) * x).sum::<f64>()
            }
            Curve::TwoSided { group, e, f } => {
                if t == 0.0 {
                    return 0.0;
                }
                let v = if t > 0.0 { e } else { f };
                group.alpha().iter().zip(v).zip(xi).map(|((al, c), x)| a.powf(*al) * c * x).sum()
            }
            Curve::ConvexPlane { gamma } => xi[0] * t + xi[1] * gamma.value(t),
        }
    }

    /// ξ·Γ'(t) without allocating.
    pub fn dot_derivative(&self, t: f64, xi: &[f64]) -> f64 {
        let a = t.abs();
        match self {
            Curve::Homogeneous { group } => {
                group.alpha().iter().zip(xi).map(|(al, x)| al * a.powf(al - 1.0) * x).sum()
            }
            Curve::TwoSided { group, e, f } => {
                let (v, s) = if t >= 0.0 { (e, 1.0) } else { (f, -1.0) };
                s * group
                    .alpha()
                    .iter()
                    .zip(v)
                    .zip(xi)
                    .map(|((al, c), x)| al * a.powf(al - 1.0) * c * x)
                    .sum::<f64>()
            }
            Curve::ConvexPlane { gamma } => xi[0] + xi[1] * gamma.d1(t),
        }
    }

    /// True when Γ(−t) = −Γ(t) holds by construction.
    pub fn is_odd(&self) -> bool {
        match self {
            Curve::Homogeneous { .. } | Curve::ConvexPlane { .. } => true,
            Curve::TwoSided { e, f, .. } => e.iter().zip(f).all(|(a, b)| *a == -*b),
        }
    }

    pub fn as_two_sided(&self) -> Option<(&DilationGroup, Vec<f64>, Vec<f64>)> {
        match self {
            Curve::Homogeneous { group } => {
                Some((group, vec![1.0; group.dim()], vec![-1.0; group.dim()]))
            }
            Curve::TwoSided { group, e, f } => Some((group, e.clone(), f.clone())),
            Curve::ConvexPlane { .. } => None,
        }
    }
}

/// Outcome of [`make_two_sided`]: the curve plus whether the null-space
/// condition could be checked.
#[derive(Debug, Clone)]
pub struct TwoSidedCurve {
    pub curve: Curve,
    /// False when repeated exponents make the zero-pattern test inapplicable.
    pub null_space_checked: bool,
}

/// Builds Γ(t) = δ_t e (t > 0), δ_{-t} f (t < 0), verifying that ξ·Γ vanishes
/// identically on t > 0 exactly when it does on t < 0.
pub fn make_two_sided(group: DilationGroup, e: Vec<f64>, f: Vec<f64>) -> Result<TwoSidedCurve> {
    for v in [&e, &f] {
        if v.len() != group.dim() {
            return Err(Error::Dimension { expected: group.dim(), got: v.len() });
        }
        if v.iter().any(|c| !c.is_finite()) {
            return domain("curve vectors must be finite");
        }
    }
    let null_space_checked = group.has_distinct_exponents();
    if null_space_checked {
        if let Some(i) = (0..e.len()).find(|&i| (e[i] == 0.0) != (f[i] == 0.0)) {
            return Err(Error::Validation(format!(
                "zero pattern of e and f differs in coordinate {} (e={}, f={})",
                i + 1,
                e[i],
                f[i]
            )));
        }
    }
    Ok(TwoSidedCurve { curve: Curve::TwoSided { group, e, f }, null_space_checked })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl TGrid {
    pub fn log_spaced(t_min: f64, t_max: f64, count: usize) -> Self {
        Self { t_min, t_max, count }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.t_min];
        }
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        (0..self.count)
            .map(|k| (a + (b - a) * k as f64 / (self.count - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub is_odd: bool,
    pub is_increasing: bool,
    pub is_convex: bool,
    pub second_derivative_monotone: bool,
    /// max γ'(t)/(tγ''(t)) over the grid; +∞ when γ'' vanishes where γ' does not.
    pub best_c: f64,
    pub best_c_infinite: bool,
    /// Grid points where γ' and γ'' both evaluate to 0 (underflow) and are skipped.
    pub skipped_points: usize,
    pub grid: TGrid,
}

impl ConvexityReport {
    pub fn all_hold(&self) -> bool {
        self.is_odd
            && self.is_increasing
            && self.is_convex
            && self.second_derivative_monotone
            && !self.best_c_infinite
    }
}

/// Checks the hypotheses on γ by sampling a positive grid.
pub fn validate_convex_curve(gamma: &ConvexProfile, grid: &TGrid) -> Result<ConvexityReport> {
    if !(grid.t_min > 0.0) || grid.t_max < grid.t_min || grid.count == 0 {
        return domain("t-grid must be positive and sorted");
    }
    let ts = grid.points();
    let scale = |v: f64| 1e-12 * (1.0 + v.abs());
    let is_odd = ts.iter().all(|&t| (gamma.value(-t) + gamma.value(t)).abs() <= scale(gamma.value(t)));
    let vals: Vec<f64> = ts.iter().map(|&t| gamma.value(t)).collect();
    let d1: Vec<f64> = ts.iter().map(|&t| gamma.d1(t)).collect();
    let d2: Vec<f64> = ts.iter().map(|&t| gamma.d2(t)).collect();
    let is_increasing = d1.iter().all(|&v| v >= 0.0)
        && vals.windows(2).all(|w| w[1] >= w[0] - scale(w[0]))
        && gamma.value(0.0) <= vals[0];
    let is_convex = d2.iter().all(|&v| v >= 0.0) && d1.windows(2).all(|w| w[1] >= w[0] - scale(w[0]));
    let non_decreasing = d2.windows(2).all(|w| w[1] >= w[0] - scale(w[0]));
    let non_increasing = d2.windows(2).all(|w| w[1] <= w[0] + scale(w[0]));
    let mut best_c = 0.0f64;
    let mut best_c_infinite = false;
    let mut skipped_points = 0;
    for ((&t, &g1), &g2) in ts.iter().zip(&d1).zip(&d2) {
        if g1 == 0.0 && g2 == 0.0 {
            skipped_points += 1;
            continue;
        }
        if g2 == 0.0 {
            best_c_infinite = true;
            continue;
        }
        best_c = best_c.max(g1 / (t * g2));
    }
    if best_c_infinite {
        best_c = f64::INFINITY;
    }
    Ok(ConvexityReport {
        is_odd,
        is_increasing,
        is_convex,
        second_derivative_monotone: non_decreasing || non_increasing,
        best_c,
        best_c_infinite,
        skipped_points,
        grid: grid.clone(),
    })
}

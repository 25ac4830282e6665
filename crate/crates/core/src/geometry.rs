//! Anisotropic dilations δ_t x = (t^{α_1}x_1, …, t^{α_n}x_n) and the quasi-norm ρ
//! attached to them: the unique r > 0 with Σ x_i² r^{-2α_i} = 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Inputs with a Euclidean norm below this are treated as the origin.
const ORIGIN_CUTOFF: f64 = 1e-300;
/// Relative width in log-space at which bisection hands over to Newton.
const BISECT_WIDTH: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr", into = "GroupRepr")]
pub struct DilationGroup {
    alpha: Vec<f64>,
    delta_cap: f64,
    normalized: bool,
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    alpha: Vec<f64>,
}

impl TryFrom<GroupRepr> for DilationGroup {
    type Error = crate::Error;
    fn try_from(r: GroupRepr) -> Result<Self> {
        DilationGroup::new(r.alpha)
    }
}

impl From<DilationGroup> for GroupRepr {
    fn from(g: DilationGroup) -> Self {
        GroupRepr { alpha: g.alpha }
    }
}

/// A point written as δ_ρ ω with ω on the Euclidean unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPoint {
    pub rho: f64,
    pub omega: Vec<f64>,
}

impl DilationGroup {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return domain("dilation group needs at least one exponent");
        }
        if alpha.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return domain(format!("exponents must be positive and finite, got {alpha:?}"));
        }
        let delta_cap = alpha.iter().sum();
        let normalized = alpha[0] == 1.0 && alpha.iter().all(|&a| a >= 1.0);
        Ok(Self { alpha, delta_cap, normalized })
    }

    /// Rescales so the smallest exponent is 1.
    pub fn new_normalized(alpha: Vec<f64>) -> Result<Self> {
        let g = Self::new(alpha)?;
        let min = g.alpha.iter().cloned().fold(f64::INFINITY, f64::min);
        Self::new(g.alpha.iter().map(|a| a / min).collect())
    }

    /// The isotropic group α = (1, …, 1).
    pub fn isotropic(n: usize) -> Self {
        Self::new(vec![1.0; n]).expect("n >= 1")
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// Homogeneous dimension Δ = Σ α_i.
    pub fn delta_cap(&self) -> f64 {
        self.delta_cap
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn has_distinct_exponents(&self) -> bool {
        let a = &self.alpha;
        (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i] != a[j]))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(crate::Error::Dimension { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    pub fn rho(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if x.iter().any(|v| !v.is_finite()) {
            return domain("rho of a non-finite point");
        }
        Ok(self.rho_unchecked(x))
    }

    /// ρ without input validation, for inner loops where x is known finite.
    pub fn rho_unchecked(&self, x: &[f64]) -> f64 {
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        let norm = norm2.sqrt();
        if norm < ORIGIN_CUTOFF {
            return 0.0;
        }
        let (amin, amax) = self
            .alpha
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        if amin == amax {
            return norm.powf(1.0 / amin);
        }
        // Work in s = ln r; f(s) = Σ x_i² e^{-2α_i s} − 1 is strictly decreasing.
        let ln_norm = norm.ln();
        let (s1, s2) = (ln_norm / amax, ln_norm / amin);
        let (mut lo, mut hi) = (s1.min(s2), s1.max(s2));
        let f = |s: f64| -> (f64, f64) {
            let mut v = -1.0;
            let mut d = 0.0;
            for (xi, a) in x.iter().zip(&self.alpha) {
                let term = xi * xi * (-2.0 * a * s).exp();
                v += term;
                d -= 2.0 * a * term;
            }
            (v, d)
        };
        while hi - lo > BISECT_WIDTH {
            let mid = 0.5 * (lo + hi);
            if f(mid).0 > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut s = 0.5 * (lo + hi);
        for _ in 0..8 {
            let (v, d) = f(s);
            if v.abs() <= 1e-15 || d == 0.0 {
                break;
            }
            let next = s - v / d;
            if !(next >= lo - BISECT_WIDTH && next <= hi + BISECT_WIDTH) {
                break;
            }
            s = next;
        }
        s.exp()
    }

    /// Residual Σ x_i² r^{-2α_i} − 1 of the defining equation.
    pub fn rho_residual(&self, x: &[f64], r: f64) -> f64 {
        x.iter()
            .zip(&self.alpha)
            .map(|(xi, a)| xi * xi * r.powf(-2.0 * a))
            .sum::<f64>()
            - 1.0
    }

    pub fn dilate(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("dilation parameter must be positive, got {t}"));
        }
        Ok(self.dilate_unchecked(t, x))
    }

    pub fn dilate_unchecked(&self, t: f64, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.alpha).map(|(v, a)| t.powf(*a) * v).collect()
    }

    pub fn polar_decompose(&self, x: &[f64]) -> Result<PolarPoint> {
        let rho = self.rho(x)?;
        if rho == 0.0 {
            return domain("polar decomposition of the origin");
        }
        Ok(PolarPoint { rho, omega: self.dilate_unchecked(1.0 / rho, x) })
    }

    /// Jacobian factor Σ α_i ω_i² in dx = r^{Δ-1} Σ α_i ω_i² dr dω.
    pub fn sphere_weight(&self, omega: &[f64]) -> Result<f64> {
        self.check_dim(omega)?;
        let n2: f64 = omega.iter().map(|v| v * v).sum();
        if (n2 - 1.0).abs() > 1e-8 {
            return domain(format!("sphere weight needs a unit vector, |ω|² = {n2}"));
        }
        Ok(omega.iter().zip(&self.alpha).map(|(w, a)| a * w * w).sum())
    }

    /// Empirical sup of ρ(x+y)/(ρ(x)+ρ(y)) over seeded random pairs.
    ///
    /// Magnitudes are log-uniform over several decades in each coordinate, and a
    /// share of pairs are parallel to a coordinate axis. The degenerate pair
    /// (x, 0) gives ratio 1, so the result is never below 1.
    pub fn quasi_triangle_constant(&self, sample_count: usize, seed: u64) -> f64 {
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    let mag = 10f64.powf(rng.gen_range(-3.0..3.0));
                    if rng.gen_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect()
        };
        let mut best = 1.0f64;
        let mut sum = vec![0.0; n];
        for k in 0..sample_count {
            let mut x = sample(&mut rng);
            let mut y = sample(&mut rng);
            if k % 8 == 7 {
                let axis = rng.gen_range(0..n);
                for i in 0..n {
                    if i != axis {
                        x[i] = 0.0;
                        y[i] = 0.0;
                    }
                }
            }
            for i in 0..n {
                sum[i] = x[i] + y[i];
            }
            let denom = self.rho_unchecked(&x) + self.rho_unchecked(&y);
            if denom > 0.0 {
                best = best.max(self.rho_unchecked(&sum) / denom);
            }
        }
        best
    }
}

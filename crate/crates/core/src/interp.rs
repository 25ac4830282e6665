//! Cubic convolution interpolation on uniform tables.

use num_complex::Complex64;

/// Catmull–Rom weights for nodes −1, 0, 1, 2 at fractional offset u.
pub(crate) fn cubic_weights(u: f64) -> [f64; 4] {
    let u2 = u * u;
    let u3 = u2 * u;
    [
        0.5 * (-u3 + 2.0 * u2 - u),
        0.5 * (3.0 * u3 - 5.0 * u2 + 2.0),
        0.5 * (-3.0 * u3 + 4.0 * u2 + u),
        0.5 * (u3 - u2),
    ]
}

/// Row-major n0 × n1 complex samples at origin + (i, j)·step, zero outside.
#[derive(Debug, Clone)]
pub(crate) struct Table2 {
    pub data: Vec<Complex64>,
    pub n: [usize; 2],
    pub origin: [f64; 2],
    pub step: [f64; 2],
}

impl Table2 {
    /// Whether the interpolation stencil at x lies inside the table.
    pub fn covers(&self, x: [f64; 2]) -> bool {
        (0..2).all(|a| {
            let p = (x[a] - self.origin[a]) / self.step[a];
            p >= 1.0 && p < (self.n[a] - 2) as f64
        })
    }

    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        if !self.covers(x) {
            return Complex64::new(0.0, 0.0);
        }
        let p0 = (x[0] - self.origin[0]) / self.step[0];
        let p1 = (x[1] - self.origin[1]) / self.step[1];
        let (i0, j0) = (p0.floor() as usize, p1.floor() as usize);
        let wi = cubic_weights(p0 - i0 as f64);
        let wj = cubic_weights(p1 - j0 as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, wa) in wi.iter().enumerate() {
            let row = (i0 + a - 1) * self.n[1];
            let mut r = Complex64::new(0.0, 0.0);
            for (b, wb) in wj.iter().enumerate() {
                r += self.data[row + j0 + b - 1] * *wb;
            }
            acc += r * *wa;
        }
        acc
    }
}

/// Periodic cubic interpolation of a uniform table at fractional index pos.
pub(crate) fn periodic_cubic(table: &[f64], pos: f64) -> f64 {
    let n = table.len() as i64;
    let f = pos.floor();
    let w = cubic_weights(pos - f);
    let i = f as i64;
    (0..4).map(|k| w[k] * table[(i + k as i64 - 1).rem_euclid(n) as usize]).sum()
}

//! Complex FFTs on row-major grids of any dimension up to two.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place unnormalized transform of an n0 × n1 row-major array; `inverse`
/// selects the e^{+2πi} sign.
pub(crate) fn fft2(data: &mut [Complex64], n0: usize, n1: usize, inverse: bool) {
    assert_eq!(data.len(), n0 * n1);
    let mut planner = FftPlanner::new();
    let plan = |n: usize, p: &mut FftPlanner<f64>| if inverse { p.plan_fft_inverse(n) } else { p.plan_fft_forward(n) };
    if n1 > 1 {
        plan(n1, &mut planner).process(data);
    }
    if n0 > 1 {
        let f = plan(n0, &mut planner);
        let mut col = vec![Complex64::new(0.0, 0.0); n0];
        for j in 0..n1 {
            for i in 0..n0 {
                col[i] = data[i * n1 + j];
            }
            f.process(&mut col);
            for i in 0..n0 {
                data[i * n1 + j] = col[i];
            }
        }
    }
}

/// Signed frequency index of bin k among n.
pub(crate) fn freq_index(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

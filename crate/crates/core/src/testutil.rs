//! Test-only oracles that stay independent of the convolution algebra:
//! direct pointwise evaluation and discrete Fourier analysis on a uniform
//! grid. Exactness of the field product is checked against these.

use num_complex::Complex64;

use crate::field::{CMat, MatrixField};

pub use crate::init::randn_mat;

/// Direct evaluation `U(x) = Σ_n Û(n) e^{inx}` by plain summation.
pub fn eval_at(f: &MatrixField, x: f64) -> CMat {
    let d = f.d();
    let mut out = CMat::zeros(d, d);
    for (n, m) in f.modes() {
        let phase = Complex64::from_polar(1.0, n as f64 * x);
        out += m.map(|z| z * phase);
    }
    out
}

/// Coefficient `n` of uniformly sampled data: `(1/P) Σ_j f(x_j) e^{-inx_j}`
/// with `x_j = 2πj/P`. Exact for band-limited data when P exceeds the
/// number of occupied modes (no aliasing back onto `n`).
pub fn dft_analyze(samples: &[CMat], n: i64) -> CMat {
    let p = samples.len();
    let d = samples[0].nrows();
    let mut out = CMat::zeros(d, d);
    for (j, s) in samples.iter().enumerate() {
        let phase = Complex64::from_polar(
            1.0,
            -2.0 * std::f64::consts::PI * n as f64 * j as f64 / p as f64,
        );
        out += s.map(|z| z * phase);
    }
    out.map(|z| z / p as f64)
}

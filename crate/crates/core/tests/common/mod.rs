//! Oracles shared by the integration suites: pointwise evaluation and
//! discrete Fourier analysis, kept independent of the coefficient algebra
//! they are used to check.
#![allow(dead_code)]

use num_complex::Complex64;
use spinbo_core::{CMat, MatrixField};

/// Direct pointwise summation `Σ_n Û(n) e^{inx}`.
pub fn eval_at(f: &MatrixField, x: f64) -> CMat {
    let mut out = CMat::zeros(f.d(), f.d());
    for (n, m) in f.modes() {
        let phase = Complex64::from_polar(1.0, n as f64 * x);
        out += m.map(|z| z * phase);
    }
    out
}

/// Mode `n` of a function sampled on `samples.len()` uniform grid points:
/// `(1/P) Σ_j f(x_j) e^{-in x_j}`.
pub fn dft_analyze(samples: &[CMat], n: i64) -> CMat {
    let p = samples.len();
    let d = samples[0].nrows();
    let mut out = CMat::zeros(d, d);
    for (j, s) in samples.iter().enumerate() {
        let x = 2.0 * std::f64::consts::PI * j as f64 / p as f64;
        let phase = Complex64::from_polar(1.0 / p as f64, -(n as f64) * x);
        out += s.map(|z| z * phase);
    }
    out
}

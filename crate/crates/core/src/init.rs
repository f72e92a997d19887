//! Deterministic initial data: presets and seeded random trial fields.
//!
//! Random matrices use independent complex Gaussian entries (real and
//! imaginary parts standard normal), drawn mode by mode in ascending order
//! so a fixed seed reproduces the same field byte for byte. Hermitian
//! fields draw modes n ≥ 0 and mirror `Û(-n) = Û(n)^H`, with the mode-0
//! draw Hermitized.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::{CMat, HardyField, MatrixField};

/// d×d matrix with independent standard complex Gaussian entries.
pub fn randn_mat(d: usize, rng: &mut impl Rng) -> CMat {
    DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z * Complex64::new(0.5, 0.0))
}

/// Random field with independent Gaussian coefficients on every mode of
/// `[lo, hi]`, all scaled by `scale`. Not Hermitian-valued.
pub fn random_field(d: usize, lo: i64, hi: i64, scale: f64, rng: &mut impl Rng) -> MatrixField {
    let s = Complex64::new(scale, 0.0);
    let modes = (lo..=hi).map(|n| (n, randn_mat(d, rng).map(|z| z * s)));
    MatrixField::from_modes(d, modes).expect("freshly drawn matrices are d x d")
}

/// Random Hermitian-valued field supported on `[-bandwidth, bandwidth]`:
/// Gaussian draws for n ≥ 0, mirrored across ±n, mode 0 Hermitized.
pub fn random_hermitian(d: usize, bandwidth: i64, scale: f64, rng: &mut impl Rng) -> MatrixField {
    let s = Complex64::new(scale, 0.0);
    let mut modes = Vec::new();
    let zero = hermitize(&randn_mat(d, rng)).map(|z| z * s);
    modes.push((0, zero));
    for n in 1..=bandwidth {
        let m = randn_mat(d, rng).map(|z| z * s);
        modes.push((-n, m.adjoint()));
        modes.push((n, m));
    }
    MatrixField::from_modes(d, modes).expect("freshly drawn matrices are d x d")
}

/// Random Hardy test field on modes `[0, hi]`.
pub fn random_hardy(d: usize, hi: i64, scale: f64, rng: &mut impl Rng) -> HardyField {
    random_field(d, 0, hi, scale, rng)
        .project_nonneg()
}

/// `amplitude · 2cos(x) · H` for a Hermitian matrix `H` (identity when not
/// given): coefficient `amplitude·H` on each of the modes ±1.
pub fn cosine_field(d: usize, amplitude: f64, h: Option<&CMat>) -> Result<MatrixField> {
    let h = match h {
        Some(m) => {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::InvalidConfig(format!(
                    "cosine preset matrix must be {d}x{d}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let defect = (m - m.adjoint()).norm();
            if defect > 1e-12 * m.norm().max(1.0) {
                return Err(Error::InvalidConfig(format!(
                    "cosine preset matrix is not Hermitian (defect {defect:.3e})"
                )));
            }
            m.clone()
        }
        None => CMat::identity(d, d),
    };
    let a = Complex64::new(amplitude, 0.0);
    let coeff = h.map(|z| z * a);
    MatrixField::from_modes(d, [(-1, coeff.clone()), (1, coeff)])
        .map_err(|e| Error::InvalidConfig(e.to_string()))
}

/// Seeded random Hermitian field with exact exponential coefficient decay:
/// `‖Û(n)‖_F = amplitude · e^{-rate·n}` for 0 ≤ n ≤ bandwidth.
pub fn decay_field(
    d: usize,
    bandwidth: i64,
    amplitude: f64,
    rate: f64,
    seed: u64,
) -> MatrixField {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for n in 0..=bandwidth {
        let target = amplitude * (-rate * n as f64).exp();
        let raw = if n == 0 {
            hermitize(&randn_mat(d, &mut rng))
        } else {
            randn_mat(d, &mut rng)
        };
        let norm = raw.norm();
        if norm == 0.0 {
            continue;
        }
        let m = raw.map(|z| z * Complex64::new(target / norm, 0.0));
        if n == 0 {
            modes.push((0, m));
        } else {
            modes.push((-n, m.adjoint()));
            modes.push((n, m));
        }
    }
    MatrixField::from_modes(d, modes).expect("freshly drawn matrices are d x d")
}

/// Per-trial RNG stream: decorrelates (seed, d, bandwidth, trial) cells
/// with a splitmix-style hash so campaign cells are independent.
pub fn trial_rng(seed: u64, d: usize, bandwidth: i64, trial: u64) -> ChaCha12Rng {
    let mut z = seed
        ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (bandwidth as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9)
        ^ trial.wrapping_mul(0x94d0_49bb_1331_11eb);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha12Rng::seed_from_u64(z ^ (z >> 31))
}

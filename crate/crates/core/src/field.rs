//! Matrix-valued trigonometric polynomials on the normalized torus.
//!
//! A field is `U(x) = Σ_n Û(n) e^{inx}` with `Û(n)` a dense d×d complex
//! matrix and the measure of the torus normalized to 1, so `⟨U⟩ = Û(0)`
//! and `⟨A|B⟩ = ∫ tr(A B*) dx = Σ_n tr(Â(n) B̂(n)^H)`.
//!
//! All products are exact convolutions: `(AB)^(n) = Σ_k Â(k) B̂(n-k)` with
//! the output band equal to the sum of the operand bands. Nothing here
//! truncates implicitly; Galerkin truncation is an explicit operation.
//!
//! A field is Hermitian-valued iff `Û(-n) = Û(n)^H` for every n, which is
//! what [`MatrixField::herm_defect`] measures coefficient-wise.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Fourier multipliers used throughout: `D = (1/i)∂_x` acts as `n`,
/// `|D|` as `|n|`, `∂_x` as `in`, and the Hilbert transform `H = i sign(D)`
/// as `i sign(n)` with `sign(0) = 0`, so that `H∂_x = -|D|` on the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    D,
    AbsD,
    Dx,
    Hilbert,
}

impl Symbol {
    pub fn factor(self, n: i64) -> Complex64 {
        match self {
            Symbol::D => Complex64::new(n as f64, 0.0),
            Symbol::AbsD => Complex64::new(n.unsigned_abs() as f64, 0.0),
            Symbol::Dx => Complex64::new(0.0, n as f64),
            Symbol::Hilbert => Complex64::new(0.0, n.signum() as f64),
        }
    }
}

fn is_zero_mat(m: &CMat) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

/// A matrix-valued trigonometric polynomial with a two-sided mode range.
///
/// Coefficients are kept in a sparse ordered map; absent modes are zero and
/// exactly-zero matrices are pruned so the stored support is minimal.
/// Values are immutable after construction and all operations are pure.
#[derive(Clone, Debug)]
pub struct MatrixField {
    d: usize,
    coeffs: BTreeMap<i64, CMat>,
}

impl MatrixField {
    pub fn zero(d: usize) -> Self {
        MatrixField {
            d,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant field `x ↦ m`.
    pub fn constant(m: CMat) -> Self {
        let d = m.nrows();
        let mut f = MatrixField::zero(d);
        f.insert(0, m);
        f
    }

    /// The constant identity field.
    pub fn identity(d: usize) -> Self {
        MatrixField::constant(CMat::identity(d, d))
    }

    /// A single mode `m e^{inx}`.
    pub fn single(n: i64, m: CMat) -> Self {
        let d = m.nrows();
        let mut f = MatrixField::zero(d);
        f.insert(n, m);
        f
    }

    pub fn from_modes<I>(d: usize, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, CMat)>,
    {
        let mut f = MatrixField::zero(d);
        for (n, m) in modes {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::InvalidField(format!(
                    "mode {n}: expected a {d}x{d} matrix, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            match f.coeffs.get_mut(&n) {
                Some(existing) => *existing += m,
                None => f.insert(n, m),
            }
        }
        f.prune();
        Ok(f)
    }

    fn insert(&mut self, n: i64, m: CMat) {
        debug_assert_eq!(m.nrows(), self.d);
        debug_assert_eq!(m.ncols(), self.d);
        if !is_zero_mat(&m) {
            self.coeffs.insert(n, m);
        }
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, m| !is_zero_mat(m));
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Lowest retained mode (0 for the zero field).
    pub fn lo(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(0)
    }

    /// Highest retained mode (0 for the zero field).
    pub fn hi(&self) -> i64 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// `max(|lo|, hi)`: the smallest M with support inside [-M, M].
    pub fn bandwidth(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|n| n.unsigned_abs() as i64)
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_modes(&self) -> usize {
        self.coeffs.len()
    }

    /// Iterate stored (mode, coefficient) pairs in ascending mode order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, &CMat)> {
        self.coeffs.iter().map(|(n, m)| (*n, m))
    }

    pub fn mode(&self, n: i64) -> Option<&CMat> {
        self.coeffs.get(&n)
    }

    /// Coefficient at mode n, materializing zeros for absent modes.
    pub fn coeff(&self, n: i64) -> CMat {
        self.coeffs
            .get(&n)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.d, self.d))
    }

    fn check_d(&self, other: &MatrixField) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                left: self.d,
                right: other.d,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MatrixField) -> Result<MatrixField> {
        self.check_d(other)?;
        let mut out = self.clone();
        for (n, m) in &other.coeffs {
            match out.coeffs.get_mut(n) {
                Some(existing) => *existing += m,
                None => out.insert(*n, m.clone()),
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &MatrixField) -> Result<MatrixField> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> MatrixField {
        let mut out = MatrixField::zero(self.d);
        if c.re == 0.0 && c.im == 0.0 {
            return out;
        }
        for (n, m) in &self.coeffs {
            out.insert(*n, m.map(|z| z * c));
        }
        out
    }

    pub fn neg(&self) -> MatrixField {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    /// Exact convolution product, matrix order preserved:
    /// `(ab)^(n) = Σ_k â(k) b̂(n-k)`, output band `[a.lo+b.lo, a.hi+b.hi]`.
    pub fn mul(&self, other: &MatrixField) -> Result<MatrixField> {
        self.check_d(other)?;
        Ok(self.conv(other))
    }

    fn conv(&self, other: &MatrixField) -> MatrixField {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return MatrixField::zero(self.d);
        }
        let d = self.d;
        let one = Complex64::new(1.0, 0.0);
        // dense accumulator over the output band; beats a map lookup per
        // mode pair on band-limited data
        let lo = self.lo() + other.lo();
        let hi = self.hi() + other.hi();
        let mut acc: Vec<Option<CMat>> = vec![None; (hi - lo + 1) as usize];
        for (na, ma) in &self.coeffs {
            for (nb, mb) in &other.coeffs {
                let slot = &mut acc[(na + nb - lo) as usize];
                let entry = slot.get_or_insert_with(|| CMat::zeros(d, d));
                entry.gemm(one, ma, mb, one);
            }
        }
        let coeffs = acc
            .into_iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|m| (lo + i as i64, m)))
            .collect();
        let mut out = MatrixField { d, coeffs };
        out.prune();
        out
    }

    /// Commutator `[a, b] = ab - ba` in the field algebra.
    pub fn commutator(&self, other: &MatrixField) -> Result<MatrixField> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Anticommutator `{a, b} = ab + ba`.
    pub fn anticommutator(&self, other: &MatrixField) -> Result<MatrixField> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// Pointwise Hermitian conjugate: `(a*)^(n) = (â(-n))^H`.
    pub fn adjoint(&self) -> MatrixField {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(n, m)| (-n, m.adjoint()))
            .collect();
        MatrixField {
            d: self.d,
            coeffs,
        }
    }

    /// Szegő projection `Π_{≥0}`: keep modes n ≥ 0.
    pub fn project_nonneg(&self) -> HardyField {
        let coeffs = self
            .coeffs
            .range(0..)
            .map(|(n, m)| (*n, m.clone()))
            .collect();
        HardyField(MatrixField {
            d: self.d,
            coeffs,
        })
    }

    /// `Π_{<0} = Id - Π_{≥0}`: keep modes n < 0.
    pub fn project_neg(&self) -> MatrixField {
        let coeffs = self
            .coeffs
            .range(..0)
            .map(|(n, m)| (*n, m.clone()))
            .collect();
        MatrixField {
            d: self.d,
            coeffs,
        }
    }

    /// Apply a Fourier multiplier mode-wise.
    pub fn multiplier(&self, sym: Symbol) -> MatrixField {
        self.multiplier_fn(|n| sym.factor(n))
    }

    pub fn multiplier_fn(&self, f: impl Fn(i64) -> Complex64) -> MatrixField {
        let mut out = MatrixField::zero(self.d);
        for (n, m) in &self.coeffs {
            let c = f(*n);
            out.insert(*n, m.map(|z| z * c));
        }
        out
    }

    /// `∂_x`
    pub fn derivative(&self) -> MatrixField {
        self.multiplier(Symbol::Dx)
    }

    /// `|D|`
    pub fn abs_d(&self) -> MatrixField {
        self.multiplier(Symbol::AbsD)
    }

    /// Hilbert transform `H = i sign(D)`, annihilating mode 0.
    pub fn hilbert(&self) -> MatrixField {
        self.multiplier(Symbol::Hilbert)
    }

    /// `⟨a|b⟩ = ∫ tr(a b*) dx = Σ_n tr(â(n) b̂(n)^H)`.
    pub fn inner(&self, other: &MatrixField) -> Result<Complex64> {
        self.check_d(other)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, ma) in &self.coeffs {
            if let Some(mb) = other.coeffs.get(n) {
                // tr(A B^H) = Σ_ij A_ij conj(B_ij)
                sum += mb.dotc(ma);
            }
        }
        Ok(sum)
    }

    /// Mean value over the torus: `⟨a⟩ = â(0)`.
    pub fn mean(&self) -> CMat {
        self.coeff(0)
    }

    /// Galerkin truncation: drop modes with |n| > m.
    pub fn truncate(&self, m: i64) -> MatrixField {
        let coeffs = self
            .coeffs
            .range(-m..=m)
            .map(|(n, c)| (*n, c.clone()))
            .collect();
        MatrixField {
            d: self.d,
            coeffs,
        }
    }

    /// L² norm, `sqrt(Σ_n ‖â(n)‖_F²)`; equals `sqrt(⟨a|a⟩)`.
    pub fn norm_l2(&self) -> f64 {
        self.coeffs
            .values()
            .map(|m| m.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Max over n of `‖â(n) - â(-n)^H‖_F`; zero iff Hermitian-valued.
    pub fn herm_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for n in self.coeffs.keys().map(|n| n.unsigned_abs() as i64) {
            let diff = self.coeff(n) - self.coeff(-n).adjoint();
            defect = defect.max(diff.norm());
        }
        defect
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.herm_defect() <= tol
    }

    /// Relative Frobenius distance over all modes:
    /// `‖a-b‖ / max(‖a‖, ‖b‖)`, with 0 when both vanish.
    pub fn rel_distance(&self, other: &MatrixField) -> f64 {
        let scale = self.norm_l2().max(other.norm_l2());
        if scale == 0.0 {
            return 0.0;
        }
        match self.sub(other) {
            Ok(diff) => diff.norm_l2() / scale,
            Err(_) => f64::INFINITY,
        }
    }
}

/// A matrix-valued trigonometric polynomial with modes ≥ 0 only, an
/// element of the Hardy space. The wrapper is the proof that `Π_{<0}`
/// of it vanishes; every constructor enforces it.
#[derive(Clone, Debug)]
pub struct HardyField(MatrixField);

impl HardyField {
    pub fn try_new(f: MatrixField) -> Result<Self> {
        if f.lo() < 0 {
            return Err(Error::NegativeModes { lo: f.lo() });
        }
        Ok(HardyField(f))
    }

    pub fn zero(d: usize) -> Self {
        HardyField(MatrixField::zero(d))
    }

    /// The constant field `x ↦ m` (constants lie in the Hardy space).
    pub fn constant(m: CMat) -> Self {
        HardyField(MatrixField::constant(m))
    }

    /// The constant identity field `𝟏`.
    pub fn identity(d: usize) -> Self {
        HardyField(MatrixField::identity(d))
    }

    pub fn field(&self) -> &MatrixField {
        &self.0
    }

    pub fn into_field(self) -> MatrixField {
        self.0
    }

    /// `∂_x` preserves the mode support, hence the Hardy property.
    pub fn derivative(&self) -> HardyField {
        HardyField(self.0.derivative())
    }

    pub fn add(&self, other: &HardyField) -> Result<HardyField> {
        Ok(HardyField(self.0.add(&other.0)?))
    }

    pub fn sub(&self, other: &HardyField) -> Result<HardyField> {
        Ok(HardyField(self.0.sub(&other.0)?))
    }

    pub fn scale(&self, c: Complex64) -> HardyField {
        HardyField(self.0.scale(c))
    }
}

impl std::ops::Deref for HardyField {
    type Target = MatrixField;

    fn deref(&self) -> &MatrixField {
        &self.0
    }
}

impl From<HardyField> for MatrixField {
    fn from(f: HardyField) -> MatrixField {
        f.0
    }
}

//! Lax operators on the Hardy space and the operator identities behind them.
//!
//! On `𝓗` (matrix-valued fields with modes ≥ 0) we realize
//!
//! * the Toeplitz operator `T_U F = Π_{≥0}(U F)`,
//! * `L_U = D - T_U` with `D = (1/i)∂_x`,
//! * `B_U = i(T_{|D|U} - T_U²)`,
//!
//! both as exact actions in the convolution algebra and as finite
//! sections (Galerkin compressions) on modes `0..=N` for spectra.
//!
//! Identity residuals are computed exclusively through the exact algebra:
//! products of finite sections are wrong near the truncation boundary and
//! would contaminate them. Compressions exist here for eigenvalues only.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::dynamics::rhs_full;
use crate::error::{Error, Result};
use crate::field::{CMat, HardyField, MatrixField, Symbol};

/// Relative Hermitian-defect tolerance accepted by spectral routines.
pub const SPECTRUM_HERM_TOL: f64 = 1e-10;

/// `T_U F = Π_{≥0}(U F)`, exact.
pub fn apply_t(u: &MatrixField, f: &HardyField) -> Result<HardyField> {
    Ok(u.mul(f.field())?.project_nonneg())
}

/// `L_U F = D F - T_U F`, exact.
pub fn apply_l(u: &MatrixField, f: &HardyField) -> Result<HardyField> {
    // multipliers preserve the mode support, so the wrap cannot fail
    let df = HardyField::try_new(f.multiplier(Symbol::D))?;
    df.sub(&apply_t(u, f)?)
}

/// `L_U^k F`.
pub fn apply_l_iter(u: &MatrixField, f: &HardyField, k: usize) -> Result<HardyField> {
    let mut out = f.clone();
    for _ in 0..k {
        out = apply_l(u, &out)?;
    }
    Ok(out)
}

/// `B_U F = i (T_{|D|U} F - T_U (T_U F))`, exact.
pub fn apply_b(u: &MatrixField, f: &HardyField) -> Result<HardyField> {
    let dispersive = apply_t(&u.abs_d(), f)?;
    let squared = apply_t(u, &apply_t(u, f)?)?;
    Ok(dispersive.sub(&squared)?.scale(Complex64::new(0.0, 1.0)))
}

/// Finite section of an operator on `𝓗`, restricted to modes `0..=n_max`.
///
/// Mode-major block layout: block `(j, k)` is the d×d matrix coupling
/// input mode k to output mode j, so the full matrix has side
/// `(n_max+1)·d`. Since the symbol acts by left multiplication, every
/// column of a matrix-valued input transforms independently and the
/// compression acts column-by-column.
#[derive(Clone, Debug)]
pub struct CompressedOperator {
    d: usize,
    n_max: usize,
    entries: CMat,
}

impl CompressedOperator {
    fn zeros(d: usize, n_max: usize) -> Self {
        let side = (n_max + 1) * d;
        CompressedOperator {
            d,
            n_max,
            entries: CMat::zeros(side, side),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn side(&self) -> usize {
        (self.n_max + 1) * self.d
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn block(&self, j: usize, k: usize) -> CMat {
        self.entries
            .view((j * self.d, k * self.d), (self.d, self.d))
            .into()
    }

    fn set_block(&mut self, j: usize, k: usize, m: &CMat) {
        self.entries
            .view_mut((j * self.d, k * self.d), (self.d, self.d))
            .copy_from(m);
    }

    /// Apply the section to a Hardy field (input truncated to `0..=n_max`,
    /// output supported there as well): `out(j) = Σ_k block(j,k)·F̂(k)`.
    pub fn apply(&self, f: &HardyField) -> Result<HardyField> {
        if f.d() != self.d {
            return Err(Error::DimensionMismatch {
                left: self.d,
                right: f.d(),
            });
        }
        let one = Complex64::new(1.0, 0.0);
        let mut out: Vec<CMat> = vec![CMat::zeros(self.d, self.d); self.n_max + 1];
        for (k, fk) in f.modes() {
            let k = k as usize;
            if k > self.n_max {
                continue;
            }
            for (j, out_j) in out.iter_mut().enumerate() {
                let block = self
                    .entries
                    .view((j * self.d, k * self.d), (self.d, self.d));
                out_j.gemm(one, &block, fk, one);
            }
        }
        let field = MatrixField::from_modes(
            self.d,
            out.into_iter().enumerate().map(|(j, m)| (j as i64, m)),
        )?;
        HardyField::try_new(field)
    }

    /// `max |entry - (conjugate transpose entry)|`, zero for Hermitian sections.
    pub fn herm_defect(&self) -> f64 {
        let diff = &self.entries - self.entries.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Same, against the negated transpose: zero for anti-Hermitian sections.
    pub fn anti_herm_defect(&self) -> f64 {
        let diff = &self.entries + self.entries.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the section, ascending, assuming it is Hermitian.
    fn eigenvalues_hermitian(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.entries.clone());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Finite section of `T_U`: block Toeplitz, block `(j,k) = Û(j-k)`.
pub fn toeplitz_compress(u: &MatrixField, n_max: usize) -> CompressedOperator {
    let d = u.d();
    let mut op = CompressedOperator::zeros(d, n_max);
    for j in 0..=n_max {
        for k in 0..=n_max {
            if let Some(m) = u.mode(j as i64 - k as i64) {
                op.set_block(j, k, m);
            }
        }
    }
    op
}

/// Finite section of `L_U = D - T_U`: `diag-block(n·I) - toeplitz(U)`.
pub fn compress_l(u: &MatrixField, n_max: usize) -> CompressedOperator {
    let d = u.d();
    let mut op = toeplitz_compress(u, n_max);
    op.entries.neg_mut();
    for j in 0..=n_max {
        let nj = Complex64::new(j as f64, 0.0);
        for r in 0..d {
            op.entries[(j * d + r, j * d + r)] += nj;
        }
    }
    op
}

/// Finite section of `B_U = i(T_{|D|U} - T_U²)`.
///
/// The `T_U²` part is the true section of the operator product: the
/// product of two enlarged sections (grown by the symbol bandwidth)
/// restricted back to modes `0..=n_max`, which makes the result exact on
/// every input supported there. The `T_{|D|U}` part is Toeplitz, exact as
/// a plain section.
pub fn compress_b(u: &MatrixField, n_max: usize) -> CompressedOperator {
    let d = u.d();
    let pad = u.bandwidth().max(0) as usize;
    let enlarged = toeplitz_compress(u, n_max + pad);
    let product = &enlarged.entries * &enlarged.entries;
    let side = (n_max + 1) * d;
    let restricted = product.view((0, 0), (side, side));

    let dispersive = toeplitz_compress(&u.abs_d(), n_max);
    let i = Complex64::new(0.0, 1.0);
    let entries = (&dispersive.entries - restricted).map(|z| z * i);
    CompressedOperator {
        d,
        n_max,
        entries,
    }
}

/// Eigenvalues of the Hermitian compression of `L_U`, ascending.
///
/// Requires Hermitian-valued `U` (that is what makes `L_U` selfadjoint);
/// the defect is checked against [`SPECTRUM_HERM_TOL`] relative to the
/// field size.
pub fn spectrum_l(u: &MatrixField, n_max: usize) -> Result<Vec<f64>> {
    let tol = SPECTRUM_HERM_TOL * u.norm_l2().max(1.0);
    let defect = u.herm_defect();
    if defect > tol {
        return Err(Error::NotHermitian { defect, tol });
    }
    Ok(compress_l(u, n_max).eigenvalues_hermitian())
}

/// `‖(T_{AB} - T_A T_B)F - Π_{≥0}(Π_{≥0}(A) Π_{<0}(Π_{<0}(B) F))‖`,
/// computed in the exact algebra. Zero in exact arithmetic for any
/// bounded symbols A, B and any Hardy F.
pub fn lemma_residual(a: &MatrixField, b: &MatrixField, f: &HardyField) -> Result<f64> {
    let lhs = apply_t(&a.mul(b)?, f)?.sub(&apply_t(a, &apply_t(b, f)?)?)?;
    let inner = b.project_neg().mul(f.field())?.project_neg();
    let rhs = a
        .project_nonneg()
        .field()
        .mul(&inner)?
        .project_nonneg();
    Ok(lhs.sub(&rhs)?.norm_l2())
}

/// Scale for relative reporting of [`lemma_residual`].
pub fn lemma_scale(a: &MatrixField, b: &MatrixField, f: &HardyField) -> f64 {
    a.norm_l2() * b.norm_l2() * f.norm_l2()
}

/// Norm of `(T_{{U,∂_xU}} - {T_U, T_{∂_xU}} + iT_{[U,|D|U]} - i[T_U, T_{|D|U}])F`.
///
/// This is the whole content of the Lax structure: the expression vanishes
/// for every U, Hermitian or not, and every Hardy F.
pub fn critical_residual(u: &MatrixField, f: &HardyField) -> Result<f64> {
    let i = Complex64::new(0.0, 1.0);
    let du = u.derivative();
    let adu = u.abs_d();

    let sym_anti = apply_t(&u.anticommutator(&du)?, f)?;
    let op_anti = apply_t(u, &apply_t(&du, f)?)?.add(&apply_t(&du, &apply_t(u, f)?)?)?;
    let sym_comm = apply_t(&u.commutator(&adu)?, f)?.scale(i);
    let op_comm = apply_t(u, &apply_t(&adu, f)?)?
        .sub(&apply_t(&adu, &apply_t(u, f)?)?)?
        .scale(i);

    let resid = sym_anti.sub(&op_anti)?.add(&sym_comm)?.sub(&op_comm)?;
    Ok(resid.norm_l2())
}

/// Scale for relative reporting of [`critical_residual`].
pub fn critical_scale(u: &MatrixField, f: &HardyField) -> f64 {
    let un = u.norm_l2();
    un * (un + u.derivative().norm_l2()) * f.norm_l2()
}

/// Norm of `([B_U, L_U] + T_G)F` with `G` the full right-hand side of the
/// evolution equation: the operator form of the Lax equation at frozen
/// time. Zero in exact arithmetic for every U.
pub fn lax_static_residual(u: &MatrixField, f: &HardyField) -> Result<f64> {
    let commutator = apply_b(u, &apply_l(u, f)?)?.sub(&apply_l(u, &apply_b(u, f)?)?)?;
    let toeplitz = apply_t(&rhs_full(u), f)?;
    Ok(commutator.add(&toeplitz)?.norm_l2())
}

/// Scale for relative reporting of [`lax_static_residual`]: the sum of the
/// norms of the two sides whose cancellation is being measured.
pub fn lax_static_scale(u: &MatrixField, f: &HardyField) -> Result<f64> {
    let commutator = apply_b(u, &apply_l(u, f)?)?.sub(&apply_l(u, &apply_b(u, f)?)?)?;
    let toeplitz = apply_t(&rhs_full(u), f)?;
    Ok(commutator.norm_l2() + toeplitz.norm_l2())
}

/// `residual / scale` with the convention 0/0 = 0.
pub fn relative(residual: f64, scale: f64) -> f64 {
    if residual == 0.0 {
        0.0
    } else {
        residual / scale.max(f64::MIN_POSITIVE)
    }
}

//! The conservation hierarchy attached to the Lax operator.
//!
//! Scalar invariants `𝓔_k(U) = ⟨L_U^k U_+ | U_+⟩` with `U_+ = Π_{≥0}U`,
//! matrix invariants `𝓜_k(U) = mean(L_U^{k+2} 𝟏)` for `k ≥ -1`, their
//! closed low-order forms, and drift reporting along trajectories.
//!
//! For Hermitian-valued `U` the operator `L_U` is selfadjoint, so each
//! `𝓔_k` is real and `tr 𝓜_k = 𝓔_k` for `k ≥ 0`; both facts are left to
//! round-off rather than imposed.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{CMat, HardyField, MatrixField, Symbol};
use crate::hardy::apply_l;

fn infallible<T>(r: Result<T>) -> T {
    r.expect("operands share dimension by construction")
}

/// `𝓔_k(U) = ⟨L_U^k U_+ | U_+⟩`, `k ≥ 0`, exact algebra.
pub fn energy(u: &MatrixField, k: usize) -> Complex64 {
    let u_plus = u.project_nonneg();
    let mut iter = u_plus.clone();
    for _ in 0..k {
        iter = infallible(apply_l(u, &iter));
    }
    infallible(iter.field().inner(u_plus.field()))
}

/// `𝓜_k(U) = mean(L_U^{k+2} 𝟏)`, defined for `k ≥ -1`.
pub fn matrix_invariant(u: &MatrixField, k: i64) -> CMat {
    assert!(k >= -1, "matrix invariants start at order -1");
    let mut iter = HardyField::identity(u.d());
    for _ in 0..(k + 2) {
        iter = infallible(apply_l(u, &iter));
    }
    iter.mean()
}

/// Closed form `𝓔_0 = ½ tr⟨U²⟩ + ½ tr(⟨U⟩²)`.
pub fn e0_explicit(u: &MatrixField) -> Complex64 {
    let half = Complex64::new(0.5, 0.0);
    let mean_sq = infallible(u.mul(u)).mean();
    let mean = u.mean();
    half * (mean_sq.trace() + (&mean * &mean).trace())
}

/// Closed form `𝓜_0 = ½⟨U² - iUHU⟩ + ½⟨U⟩²` with `H` the Hilbert
/// transform.
pub fn m0_explicit(u: &MatrixField) -> CMat {
    let half = Complex64::new(0.5, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let sq = infallible(u.mul(u));
    let uhu = infallible(u.mul(&u.multiplier(Symbol::Hilbert)));
    let mean = u.mean();
    (sq.mean() - uhu.mean() * i) * half + &mean * &mean * half
}

/// Closed form
/// `𝓔_1 = tr⟨½U|D|U - ⅓U³⟩ + ⅓ tr(⟨U⟩³) - tr(𝓜_0 ⟨U⟩)`,
/// with `𝓜_0` taken in its own closed form.
///
/// The `+⅓` mean-coupling coefficient is forced by the operator
/// definition: for scalar `U = m + a e^{ix} + ā e^{-ix}` the operator
/// route gives `𝓔_1 = |a|² - m³ - 3m|a|²`, and only this coefficient
/// balances the closed form. The equivalence test below pins it on
/// nonzero-mean data.
pub fn e1_explicit(u: &MatrixField) -> Complex64 {
    let half = Complex64::new(0.5, 0.0);
    let third = Complex64::new(1.0 / 3.0, 0.0);
    let u_adu = infallible(u.mul(&u.abs_d()));
    let cube = infallible(infallible(u.mul(u)).mul(u));
    let mean = u.mean();
    let bulk = (u_adu.mean() * half - cube.mean() * third).trace();
    let mean_cubed = (&mean * &mean * &mean).trace();
    let coupling = (m0_explicit(u) * &mean).trace();
    bulk + third * mean_cubed - coupling
}

/// `(Σ_n (1+n²)^s ‖Û(n)‖_F²)^{1/2}`.
pub fn sobolev_norm(u: &MatrixField, s: f64) -> f64 {
    u.modes()
        .map(|(n, m)| (1.0 + (n * n) as f64).powf(s) * m.norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// Invariants of one snapshot: energies `𝓔_0..𝓔_{k_e}`, matrix
/// invariants `𝓜_{-1}..𝓜_{k_m}` (index `j` holds order `j - 1`), and the
/// Hermitian defect of the field.
#[derive(Clone, Debug)]
pub struct InvariantRecord {
    pub t: f64,
    pub energies: Vec<Complex64>,
    pub matrices: Vec<CMat>,
    pub herm_defect: f64,
}

/// Compute a full record, sharing the `L_U` iterates across orders.
pub fn invariant_record(
    u: &MatrixField,
    t: f64,
    k_e: usize,
    k_m: i64,
) -> Result<InvariantRecord> {
    if k_m < -1 {
        return Err(Error::InvalidConfig(
            "matrix invariant orders start at -1".into(),
        ));
    }
    let u_plus = u.project_nonneg();
    let mut energies = Vec::with_capacity(k_e + 1);
    let mut iter = u_plus.clone();
    energies.push(iter.field().inner(u_plus.field())?);
    for _ in 1..=k_e {
        iter = apply_l(u, &iter)?;
        energies.push(iter.field().inner(u_plus.field())?);
    }

    let mut matrices = Vec::with_capacity((k_m + 2) as usize);
    let mut one = HardyField::identity(u.d());
    for _ in 0..(k_m + 2) {
        one = apply_l(u, &one)?;
        matrices.push(one.mean());
    }

    Ok(InvariantRecord {
        t,
        energies,
        matrices,
        herm_defect: u.herm_defect(),
    })
}

/// Worst relative drifts over a sequence of records.
///
/// Relative drift of a quantity `Q` is `|Q(t) - Q(0)| / max(1, |Q(0)|)`,
/// with Frobenius norms for the matrix invariants; the absolute floor
/// keeps near-zero invariants from blowing the ratio up.
#[derive(Clone, Copy, Debug, Default)]
pub struct DriftSummary {
    pub energy_drift: f64,
    pub matrix_drift: f64,
    pub max_herm_defect: f64,
    pub max_drift: f64,
}

pub fn drift_summary(records: &[InvariantRecord]) -> DriftSummary {
    let Some(first) = records.first() else {
        return DriftSummary::default();
    };
    let mut out = DriftSummary::default();
    for rec in records {
        for (e, e0) in rec.energies.iter().zip(&first.energies) {
            let drift = (e - e0).norm() / e0.norm().max(1.0);
            out.energy_drift = out.energy_drift.max(drift);
        }
        for (m, m0) in rec.matrices.iter().zip(&first.matrices) {
            let drift = (m - m0).norm() / m0.norm().max(1.0);
            out.matrix_drift = out.matrix_drift.max(drift);
        }
        out.max_herm_defect = out.max_herm_defect.max(rec.herm_defect);
    }
    out.max_drift = out.energy_drift.max(out.matrix_drift);
    out
}

/// Records plus summary for a stored trajectory of `(t, U)` states.
pub fn drift_series(
    states: &[(f64, MatrixField)],
    k_e: usize,
    k_m: i64,
) -> Result<(Vec<InvariantRecord>, DriftSummary)> {
    if states.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let records = states
        .iter()
        .map(|(t, u)| invariant_record(u, *t, k_e, k_m))
        .collect::<Result<Vec<_>>>()?;
    let summary = drift_summary(&records);
    Ok((records, summary))
}

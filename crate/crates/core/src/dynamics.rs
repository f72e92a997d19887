//! Time evolution of the matrix-valued field.
//!
//! The flow is `∂_t U = ∂_x(|D|U - U²) - i[U, |D|U]`, split for the
//! stepper into a linear dispersive part `∂_x |D| U` (diagonal in Fourier,
//! mode `n` rotating by the phase `e^{i n |n| t}`) and the nonlinear
//! remainder. The integrating-factor RK4 scheme applies the linear phase
//! exactly and Runge-Kutta to the conjugated nonlinearity, so the only
//! truncation is the Galerkin bandwidth cut applied after each stage.
//!
//! Hermitian-valuedness is preserved by the scheme to round-off and is
//! monitored, never restored: the recorded defect is part of the output.

use num_complex::Complex64;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::field::{HardyField, MatrixField};
use crate::hardy::{apply_b, apply_l_iter, spectrum_l};
use crate::invariants::{drift_summary, invariant_record, InvariantRecord};

/// Tolerance for the internal consistency check in [`rhs_hardy`].
pub const PAIR_TOL: f64 = 1e-12;

fn infallible<T>(r: Result<T>) -> T {
    r.expect("operands share dimension by construction")
}

/// Full right-hand side `∂_x(|D|U - U²) - i[U, |D|U]`, exact.
pub fn rhs_full(u: &MatrixField) -> MatrixField {
    let adu = u.abs_d();
    let linear = adu.derivative();
    let transport = infallible(u.mul(u)).derivative();
    let rotation = infallible(u.commutator(&adu)).scale(Complex64::new(0.0, 1.0));
    infallible(infallible(linear.sub(&transport)).sub(&rotation))
}

/// Right-hand side of the Hardy-projected flow,
/// `∂_t U_+ = -i ∂_x² U_+ - 2 T_U ∂_x U_+ - 2 T_{∂_x U_-} U_+`,
/// which also equals `i L_U²(U_+) + B_U(U_+)`.
///
/// `u` and `u_plus` must be a consistent pair: `Π_{≥0} U = U_+` up to
/// [`PAIR_TOL`] relative to the field size.
pub fn rhs_hardy(u: &MatrixField, u_plus: &HardyField) -> Result<HardyField> {
    let projected = u.project_nonneg();
    let defect = projected.field().sub(u_plus.field())?.norm_l2();
    if defect > PAIR_TOL * u.norm_l2().max(1.0) {
        return Err(Error::InconsistentPair { defect });
    }
    let i = Complex64::new(0.0, 1.0);
    let ll = apply_l_iter(u, u_plus, 2)?.scale(i);
    let b = apply_b(u, u_plus)?;
    ll.add(&b)
}

/// Rebuild the field from its Hardy part: `U = U_+ + U_+^* - ⟨U_+⟩`.
///
/// The mean of `U_+` must be Hermitian, otherwise no Hermitian-valued `U`
/// has this Hardy projection.
pub fn reconstruct(u_plus: &HardyField) -> Result<MatrixField> {
    let mean = u_plus.mean();
    let defect = (&mean - mean.adjoint()).norm();
    if defect > PAIR_TOL * u_plus.norm_l2().max(1.0) {
        return Err(Error::NonHermitianMean { defect });
    }
    let sum = u_plus.field().add(&u_plus.field().adjoint())?;
    sum.sub(&MatrixField::constant(mean))
}

/// Exact linear propagator: mode `n` multiplied by `e^{i n |n| tau}`.
fn phase(u: &MatrixField, tau: f64) -> MatrixField {
    u.multiplier_fn(|n| Complex64::from_polar(1.0, (n * n.abs()) as f64 * tau))
}

fn nonlinear(u: &MatrixField, bandwidth: i64) -> MatrixField {
    let transport = infallible(u.mul(u)).derivative();
    let rotation = infallible(u.commutator(&u.abs_d())).scale(Complex64::new(0.0, 1.0));
    infallible(transport.add(&rotation))
        .scale(Complex64::new(-1.0, 0.0))
        .truncate(bandwidth)
}

/// Simulation state: time and field.
#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub u: MatrixField,
}

/// One step of the integrating-factor (Lawson) RK4 scheme at bandwidth `m`.
///
/// With `E(τ)` the exact linear propagator and `N` the truncated
/// nonlinearity:
///
/// ```text
/// k1 = N(U)
/// k2 = N(E(h/2)(U + h/2 k1))
/// k3 = N(E(h/2)U + h/2 k2)
/// k4 = N(E(h)U + h E(h/2) k3)
/// U' = E(h)U + h/6 (E(h)k1 + 2 E(h/2)(k2 + k3) + k4)
/// ```
pub fn step_ifrk4(state: &SimState, dt: f64, m: i64) -> SimState {
    let u = state.u.truncate(m);
    let half = Complex64::new(dt / 2.0, 0.0);
    let e_half_u = phase(&u, dt / 2.0);
    let e_full_u = phase(&u, dt);

    let k1 = nonlinear(&u, m);
    let k2 = nonlinear(
        &phase(&infallible(u.add(&k1.scale(half))), dt / 2.0),
        m,
    );
    let k3 = nonlinear(&infallible(e_half_u.add(&k2.scale(half))), m);
    let k4 = nonlinear(
        &infallible(e_full_u.add(&phase(&k3, dt / 2.0).scale(Complex64::new(dt, 0.0)))),
        m,
    );

    let sixth = Complex64::new(dt / 6.0, 0.0);
    let third = Complex64::new(dt / 3.0, 0.0);
    let mut next = e_full_u;
    next = infallible(next.add(&phase(&k1, dt).scale(sixth)));
    next = infallible(next.add(&phase(&infallible(k2.add(&k3)), dt / 2.0).scale(third)));
    next = infallible(next.add(&k4.scale(sixth)));

    SimState {
        t: state.t + dt,
        u: next.truncate(m),
    }
}

/// Crude operator-norm bound `Σ_n ‖Û(n)‖` used by the step-size guard.
fn sup_norm_bound(u: &MatrixField) -> f64 {
    u.modes().map(|(_, m)| m.norm()).sum()
}

/// Step size actually used: the configured `dt` capped by
/// `0.5 / (M (1 + Σ‖Û(n)‖))` evaluated on the initial data, then rounded
/// down so an integer number of steps lands exactly on `t_end`.
pub fn effective_dt(u0: &MatrixField, config: &SimConfig) -> (f64, usize) {
    let cap = 0.5 / (config.bandwidth as f64 * (1.0 + sup_norm_bound(u0)));
    let dt = config.dt.min(cap);
    let n_steps = (config.t_end / dt).ceil().max(1.0) as usize;
    (config.t_end / n_steps as f64, n_steps)
}

/// A stored snapshot of the trajectory.
#[derive(Clone, Debug)]
pub struct Snapshot {
    /// Position in the snapshot sequence, starting at 0.
    pub index: usize,
    /// Time-step count at which it was taken.
    pub step: usize,
    pub t: f64,
    pub u: MatrixField,
}

/// Output of [`simulate`]: snapshots, per-snapshot invariants, drift
/// summary and (optionally) Lax spectra.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub records: Vec<InvariantRecord>,
    pub energy_drift: f64,
    pub matrix_drift: f64,
    pub max_herm_defect: f64,
    pub spectra: Option<Vec<(f64, Vec<f64>)>>,
    pub dt_actual: f64,
    pub n_steps: usize,
}

/// Integrate the configured initial data over `[0, t_end]`, recording
/// snapshots every `snapshot_stride` steps (plus the initial and final
/// states), conserved quantities at every snapshot, and hard-limit
/// monitors at every step.
pub fn simulate(config: &SimConfig, u0: MatrixField) -> Result<Trajectory> {
    if u0.d() != config.d {
        return Err(Error::InvalidConfig(format!(
            "initial data dimension {} does not match configured d = {}",
            u0.d(),
            config.d
        )));
    }
    let m = config.bandwidth as i64;
    if u0.bandwidth() > m {
        return Err(Error::InvalidConfig(format!(
            "initial data bandwidth {} exceeds simulation bandwidth {}",
            u0.bandwidth(),
            m
        )));
    }
    let herm0 = u0.herm_defect();
    if herm0 > 1e-12 * u0.norm_l2().max(1.0) {
        return Err(Error::NotHermitian {
            defect: herm0,
            tol: 1e-12 * u0.norm_l2().max(1.0),
        });
    }

    let (dt, n_steps) = effective_dt(&u0, config);
    let tols = &config.tolerances;
    let k_e = config.energy_orders;
    let k_m = config.matrix_orders;

    let mut snapshots = Vec::new();
    let mut records = Vec::new();
    let mut spectra = if config.emit_spectra {
        Some(Vec::new())
    } else {
        None
    };

    let take = |state: &SimState,
                    step: usize,
                    snapshots: &mut Vec<Snapshot>,
                    records: &mut Vec<InvariantRecord>,
                    spectra: &mut Option<Vec<(f64, Vec<f64>)>>|
     -> Result<()> {
        let rec = invariant_record(&state.u, state.t, k_e, k_m)?;
        records.push(rec);
        if let Some(sp) = spectra {
            sp.push((state.t, spectrum_l(&state.u, config.hardy_modes)?));
        }
        snapshots.push(Snapshot {
            index: snapshots.len(),
            step,
            t: state.t,
            u: state.u.clone(),
        });
        Ok(())
    };

    let mut state = SimState { t: 0.0, u: u0 };
    take(&state, 0, &mut snapshots, &mut records, &mut spectra)?;

    for step in 1..=n_steps {
        state = step_ifrk4(&state, dt, m);
        state.t = step as f64 * dt;

        let norm = state.u.norm_l2();
        if !norm.is_finite() || norm > tols.norm_cap {
            return Err(Error::BlowUp {
                t: state.t,
                value: norm,
                cap: tols.norm_cap,
            });
        }
        let herm = state.u.herm_defect();
        if herm > tols.herm_hard_limit * norm.max(1.0) {
            return Err(Error::HardLimit {
                what: "hermitian defect",
                t: state.t,
                value: herm,
                limit: tols.herm_hard_limit * norm.max(1.0),
            });
        }

        if step % config.snapshot_stride == 0 || step == n_steps {
            take(&state, step, &mut snapshots, &mut records, &mut spectra)?;
            let summary = drift_summary(&records);
            if summary.max_drift > tols.drift_hard_limit {
                return Err(Error::HardLimit {
                    what: "invariant drift",
                    t: state.t,
                    value: summary.max_drift,
                    limit: tols.drift_hard_limit,
                });
            }
        }
    }

    let summary = drift_summary(&records);
    Ok(Trajectory {
        snapshots,
        records,
        energy_drift: summary.energy_drift,
        matrix_drift: summary.matrix_drift,
        max_herm_defect: summary.max_herm_defect,
        spectra,
        dt_actual: dt,
        n_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CMat;
    use crate::init::{random_hardy, random_hermitian, randn_mat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn rhs_full_mean_free_and_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let u = random_hermitian(2, 4, 1.0, &mut rng);
        let g = rhs_full(&u);
        assert!(g.mean().norm() < 1e-13);
        assert!(g.herm_defect() < 1e-12 * g.norm_l2().max(1.0));
    }

    #[test]
    fn constant_data_is_stationary() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let c = randn_mat(2, &mut rng);
        let h = (&c + c.adjoint()).map(|z| z * Complex64::new(0.5, 0.0));
        let u = MatrixField::constant(h);
        assert!(rhs_full(&u).is_zero());
        let state = SimState { t: 0.0, u: u.clone() };
        let next = step_ifrk4(&state, 0.05, 8);
        assert!(next.u.rel_distance(&u) < 1e-14);
    }

    /// For tiny data the flow is the linear dispersive rotation up to an
    /// O(eps² dt) nonlinear correction; one RK4 step must match the exact
    /// phase at that scale, far below eps itself.
    #[test]
    fn small_data_follows_linear_phase() {
        let eps = 1e-7;
        let n: i64 = 3;
        let mode = CMat::identity(1, 1) * Complex64::new(eps, 0.0);
        let u = MatrixField::from_modes(1, [(n, mode.clone()), (-n, mode)]).unwrap();
        let dt = 0.01;
        let next = step_ifrk4(&SimState { t: 0.0, u: u.clone() }, dt, 8);
        let exact = phase(&u, dt);
        assert!(next.u.sub(&exact).unwrap().norm_l2() < eps * eps);
    }

    #[test]
    fn rhs_hardy_agrees_with_projected_full_rhs() {
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let u = random_hermitian(2, 3, 0.7, &mut rng);
        let up = u.project_nonneg();
        let lhs = rhs_hardy(&u, &up).unwrap();
        let rhs = rhs_full(&u).project_nonneg();
        assert!(lhs.field().rel_distance(rhs.field()) < 1e-12);
    }

    /// The three published expressions for the Hardy flow agree.
    #[test]
    fn rhs_hardy_explicit_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(44);
        let u = random_hermitian(2, 3, 0.7, &mut rng);
        let up = u.project_nonneg();
        let um = u.project_neg();

        let minus_i = Complex64::new(0.0, -1.0);
        let two = Complex64::new(2.0, 0.0);
        let dxx = up
            .field()
            .multiplier_fn(|n| Complex64::new(-((n * n) as f64), 0.0));
        let t1 = dxx.scale(minus_i);
        let t2 = crate::hardy::apply_t(&u, &up.derivative())
            .unwrap()
            .scale(two);
        let t3 = crate::hardy::apply_t(&um.derivative(), &up)
            .unwrap()
            .scale(two);
        let explicit = t1.sub(t2.field()).unwrap().sub(t3.field()).unwrap();

        let operator_form = rhs_hardy(&u, &up).unwrap();
        let scale = explicit.norm_l2().max(1.0);
        assert!(
            operator_form.field().sub(&explicit).unwrap().norm_l2() / scale < 1e-12
        );
    }

    #[test]
    fn rhs_hardy_rejects_mismatched_pair() {
        let mut rng = ChaCha12Rng::seed_from_u64(45);
        let u = random_hermitian(2, 3, 1.0, &mut rng);
        let wrong = random_hardy(2, 3, 1.0, &mut rng);
        assert!(matches!(
            rhs_hardy(&u, &wrong),
            Err(Error::InconsistentPair { .. })
        ));
    }

    #[test]
    fn reconstruct_inverts_projection() {
        let mut rng = ChaCha12Rng::seed_from_u64(46);
        let u = random_hermitian(3, 4, 1.0, &mut rng);
        let rebuilt = reconstruct(&u.project_nonneg()).unwrap();
        assert!(rebuilt.rel_distance(&u) < 1e-15);
    }

    #[test]
    fn reconstruct_rejects_non_hermitian_mean() {
        let mut rng = ChaCha12Rng::seed_from_u64(47);
        let up = random_hardy(2, 3, 1.0, &mut rng);
        // generic random mean is not Hermitian
        assert!(matches!(
            reconstruct(&up),
            Err(Error::NonHermitianMean { .. })
        ));
    }

    #[test]
    fn stepper_preserves_hermitian_valuedness() {
        let mut rng = ChaCha12Rng::seed_from_u64(48);
        let u = random_hermitian(2, 3, 0.8, &mut rng);
        let mut state = SimState { t: 0.0, u };
        for _ in 0..50 {
            state = step_ifrk4(&state, 1e-3, 16);
        }
        let norm = state.u.norm_l2();
        assert!(state.u.herm_defect() < 1e-12 * norm.max(1.0));
    }

    #[test]
    fn effective_dt_caps_large_requests() {
        let config = SimConfig {
            bandwidth: 64,
            dt: 1.0,
            t_end: 1.0,
            ..SimConfig::default()
        };
        let u = MatrixField::constant(CMat::identity(2, 2));
        let (dt, n) = effective_dt(&u, &config);
        assert!(dt <= 0.5 / (64.0 * 2.0) + 1e-15);
        assert!((dt * n as f64 - 1.0).abs() < 1e-12);
    }
}

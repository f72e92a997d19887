//! Shared fixtures for the benchmarks: realistic band-limited states at
//! the sizes the simulation and verification paths actually run.

use spinbo_core::init::{decay_field, random_hardy, trial_rng};
use spinbo_core::{HardyField, MatrixField};

/// A 2x2 Hermitian state filled out to the given bandwidth, with the
/// slow coefficient decay of a field mid-run rather than of fresh
/// initial data.
pub fn dense_state(bandwidth: i64) -> MatrixField {
    decay_field(2, bandwidth, 0.5, 0.15, 4242)
}

/// A Hardy-space test vector with modes up to `hi`.
pub fn test_vector(hi: i64) -> HardyField {
    let mut rng = trial_rng(4242, 2, hi, 0);
    random_hardy(2, hi, 1.0, &mut rng)
}

//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("field is not Hermitian-valued: defect {defect:.3e} exceeds {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("mean of the Hardy part is not Hermitian (defect {defect:.3e})")]
    NonHermitianMean { defect: f64 },

    #[error("Hardy pair is inconsistent: |U_+ - proj(U)| = {defect:.3e}")]
    InconsistentPair { defect: f64 },

    #[error("field has negative modes (lowest {lo}); not in the Hardy space")]
    NegativeModes { lo: i64 },

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("hard limit tripped at t = {t}: {what} = {value:.3e} exceeds {limit:.3e}")]
    HardLimit {
        what: &'static str,
        t: f64,
        value: f64,
        limit: f64,
    },

    #[error("field norm {value:.3e} exceeds blow-up cap {cap:.3e} at t = {t}")]
    BlowUp { t: f64, value: f64, cap: f64 },

    #[error("invalid field data: {0}")]
    InvalidField(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Spectral toolkit for a matrix-valued dispersive flow on the torus.
//!
//! The field `U(x) = Σ_n Û(n) e^{inx}` takes d×d complex matrix values;
//! the flow is `∂_t U = ∂_x(|D|U - U²) - i[U, |D|U]` for Hermitian-valued
//! data. Everything is built on an exact sparse convolution algebra over
//! Fourier modes:
//!
//! * [`field`]: the algebra itself (products, projections, multipliers),
//! * [`hardy`]: Toeplitz and Lax operators on the Hardy space, their
//!   finite sections, spectra, and the operator-identity residuals,
//! * [`invariants`]: the conserved hierarchy `𝓔_k`, `𝓜_k` and drift
//!   reporting,
//! * [`dynamics`]: the integrating-factor RK4 evolution,
//! * [`config`] / [`io`] / [`init`]: run configuration, on-disk formats,
//!   initial data.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod hardy;
pub mod init;
pub mod invariants;
pub mod io;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use field::{CMat, HardyField, MatrixField, Symbol};

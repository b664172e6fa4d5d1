//! Detrended fluctuation analysis (DFA).
//!
//! The crate covers the whole chain from data to theory:
//!
//! - [`detrend`]: design, hat and weight matrices and the three equivalent
//!   forms of the per-window residual variance.
//! - [`weights`]: the weight function `G(j, s)`, its closed forms for DFA1 and
//!   DFA2, and the exact-rational asymptotic coefficients `d_q`.
//! - [`models`]: autocovariance and variogram models (fGn, fBm, OU, AR(1),
//!   white noise, tabulated).
//! - [`expectation`]: exact `E F²(s)` for stationary and stationary-increment
//!   processes, the scaling constants `λ_{m,H}` and finite-size corrections.
//! - [`estimators`]: sample DFA, gap-tolerant estimators and Hurst fits.
//! - [`generators`]: exact Gaussian synthesis and gap masks.
//! - [`mc`]: deterministic Monte Carlo ensembles.
//! - [`cli`]: the `dfa` command-line tool.

pub mod cli;
pub mod config;
pub mod detrend;
pub mod error;
pub mod estimators;
pub mod expectation;
pub mod generators;
pub mod io;
pub mod mc;
pub mod models;
pub mod numeric;
pub mod weights;

pub use error::{DfaError, Result};

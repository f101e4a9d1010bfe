//! Soft- and hard-decision decoding of qubit readout channels.
//!
//! A readout channel is a pair of conditional densities `P(O|+)`, `P(O|-)` for
//! the analog outcome `O` of a single-qubit measurement. This crate provides:
//!
//! - [`readout`]: the analytic Gaussian channel and a tabulated channel built
//!   from the generative "peak-signal" pulse process, with thresholding and
//!   inverse-CDF sampling.
//! - [`repcode`]: maximum-likelihood decoding of the N-qubit repetition code
//!   from analog or thresholded outcomes, with encoding bit flips, analytic
//!   Gaussian error rates, and a Monte Carlo error-rate harness.
//! - [`estimation`]: estimators of `s0 = <sigma_z>` (thresholded average, soft
//!   average, soft-decoded MLE), their asymptotic mean squared errors, and a
//!   Monte Carlo MSE harness.
//! - [`numerics`]: special functions, adaptive quadrature and concave
//!   maximization shared by the rest.
//!
//! The crate is `no_std` and only needs `alloc`. Monte Carlo harnesses are
//! generic over an [`Executor`]; [`Sequential`] runs on the calling thread and
//! the `softdec` companion crate provides a thread-pool implementation. Every
//! harness derives its random numbers from `(seed, index)` streams, so results
//! do not depend on how work is scheduled.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod exec;
pub mod estimation;
pub mod numerics;
pub mod readout;
pub mod repcode;
pub mod rng;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use readout::{
    ConditionalErrorRates, GaussianReadout, PeakSignalParams, QubitState, Readout, ReadoutModel,
    TabulatedReadout,
};


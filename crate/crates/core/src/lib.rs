//! Galerkin-truncated jump-diffusion SPDEs on sequence spaces: coordinate
//! cones, diagonal semigroups, sampled checks of the invariance conditions,
//! exponential-Euler simulation with cone-exit statistics, and the
//! approximation operators used to smooth coefficients.
//!
//! `!(x > 0.0)` style comparisons are used on purpose throughout so that
//! NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod appendix;
pub mod approx;
pub mod coefficients;
pub mod config;
pub mod error;
pub mod maps;
pub mod runner;
pub mod semigroup;
pub mod simulate;
pub mod space;

pub use error::{Error, Result};

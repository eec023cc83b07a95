//! Exponential-Euler simulation of the Galerkin mild solution with Q-Wiener
//! noise and compound-Poisson jumps, ensembles with cone-exit statistics,
//! coupled stability runs and the small-time tangency estimate.

mod ensemble;
mod noise;
mod scheme;
mod ssnc;

pub use ensemble::{run_ensemble, stability_experiment, PathEnsemble, StabilityPoint};
pub use noise::{derive_seed, poisson_inverse_cdf, NoiseSpec, NoiseStream, StepNoise};
pub use scheme::{simulate_path, PathResult, Scheme, SimConfig, Trajectory, DEFAULT_OVERFLOW_GUARD};
pub use ssnc::{ssnc_direction, ssnc_estimate};

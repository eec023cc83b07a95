//! Exponential-Euler stepping of the Galerkin mild solution.
//!
//! One step reads
//!
//! ```text
//! r' = S_dt [ r + dt alpha(r) - dt sum_i w_i gamma_i(r)
//!             + sum_j sigma^j(r) dW_j + sum_i N_i gamma_i(r) ]
//! ```
//!
//! with `N_i ~ Poisson(w_i dt)`. Jumps that arrive inside a step are applied
//! at its end and then transported by the full-step factor.

use serde::{Deserialize, Serialize};

use super::noise::{poisson_inverse_cdf, NoiseSpec, NoiseStream, StepNoise};
use crate::coefficients::CoefficientSet;
use crate::error::{check_dim, Error, Result};
use crate::semigroup::DiagonalSemigroup;
use crate::space::{ConeSpec, StateVec};

pub const DEFAULT_OVERFLOW_GUARD: f64 = 1e12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[default]
    #[serde(rename = "exponential-euler")]
    ExponentialEuler,
}

fn default_guard() -> f64 {
    DEFAULT_OVERFLOW_GUARD
}

/// Time grid, ensemble size and exit bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub paths: usize,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub exit_tol: f64,
    /// Project onto the cone after every step (comparison runs only).
    #[serde(default)]
    pub clip: bool,
    /// Keep every `k`-th state; no trajectory is stored when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    #[serde(default = "default_guard")]
    pub overflow_guard: f64,
}

impl SimConfig {
    pub fn new(dt: f64, horizon: f64, paths: usize) -> Self {
        Self {
            dt,
            horizon,
            paths,
            scheme: Scheme::ExponentialEuler,
            exit_tol: 0.0,
            clip: false,
            record_every: None,
            overflow_guard: DEFAULT_OVERFLOW_GUARD,
        }
    }

    pub fn with_exit_tol(mut self, tol: f64) -> Self {
        self.exit_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.horizon >= self.dt) || !self.horizon.is_finite() {
            return Err(Error::Config(format!(
                "horizon must be finite and >= dt, got T={} dt={}",
                self.horizon, self.dt
            )));
        }
        if self.paths == 0 {
            return Err(Error::Config("paths must be >= 1".into()));
        }
        if !(self.exit_tol >= 0.0) {
            return Err(Error::Config(format!("exit_tol must be >= 0, got {}", self.exit_tol)));
        }
        if self.record_every == Some(0) {
            return Err(Error::Config("record_every must be >= 1".into()));
        }
        if !(self.overflow_guard > 0.0) {
            return Err(Error::Config("overflow_guard must be > 0".into()));
        }
        let ratio = self.horizon / self.dt;
        if (ratio - ratio.round()).abs() > 1e-6 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "horizon {} is not a multiple of dt {}",
                self.horizon, self.dt
            )));
        }
        Ok(())
    }

    /// Number of steps `T / dt`.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// States recorded along a path.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVec>,
}

/// Outcome of one simulated path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathResult {
    pub seed: u64,
    /// `min_{m, k} theta_k r_k(t_m)` over the constrained coordinates,
    /// including the initial state.
    pub min_margin: f64,
    /// First grid time with margin below `-exit_tol`.
    pub exit_time: Option<f64>,
    /// Step index at which the overflow guard fired.
    pub diverged_at: Option<usize>,
    pub final_state: Option<StateVec>,
    pub trajectory: Option<Trajectory>,
}

impl PathResult {
    pub fn exited(&self, tol: f64) -> bool {
        self.diverged_at.is_none() && self.min_margin < -tol
    }
}

fn check_inputs(
    s: &DiagonalSemigroup,
    systems: &[&CoefficientSet],
    cone: &ConeSpec,
    noise: &NoiseSpec,
    cfg: &SimConfig,
    h0: &StateVec,
) -> Result<()> {
    cfg.validate()?;
    let n = s.dim();
    check_dim(n, h0.dim())?;
    check_dim(n, cone.dim())?;
    for c in systems {
        check_dim(n, c.dim())?;
        if noise.columns() > c.columns() {
            return Err(Error::Config(format!(
                "noise has {} eigenvalues but only {} volatility columns",
                noise.columns(),
                c.columns()
            )));
        }
    }
    Ok(())
}

fn step(c: &CoefficientSet, mult: &[f64], r: &StateVec, noise: &StepNoise, dt: f64) -> StateVec {
    let mut next = r.clone();
    next.axpy(dt, &c.drift.eval(r));
    for (col, &dw) in c.vol.iter().zip(&noise.dw) {
        next.axpy(dw, &col.eval(r));
    }
    for (atom, &u) in c.jumps.iter().zip(&noise.uniforms) {
        let g = atom.kernel.eval(r);
        let arrivals = poisson_inverse_cdf(u, atom.weight * dt);
        next.axpy(f64::from(arrivals) - atom.weight * dt, &g);
    }
    for (x, m) in next.coords_mut().iter_mut().zip(mult) {
        *x *= m;
    }
    next
}

/// Advances every system in `systems` with one shared noise stream seeded by
/// `seed`, calling `observe(step, t, states)` at `t = 0` and after each
/// step. Returns the final states.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_coupled(
    s: &DiagonalSemigroup,
    systems: &[&CoefficientSet],
    cone: &ConeSpec,
    noise: &NoiseSpec,
    cfg: &SimConfig,
    h0: &StateVec,
    seed: u64,
    mut observe: impl FnMut(usize, f64, &[StateVec]),
) -> Result<Vec<StateVec>> {
    check_inputs(s, systems, cone, noise, cfg, h0)?;
    let mult = s.multipliers(cfg.dt)?;
    let atoms = systems.iter().map(|c| c.jumps.len()).max().unwrap_or(0);
    let mut stream = NoiseStream::new(noise, seed);
    let mut draws = StepNoise::default();
    let mut states = vec![h0.clone(); systems.len()];
    observe(0, 0.0, &states);
    for m in 1..=cfg.steps() {
        stream.next_step(cfg.dt, atoms, &mut draws);
        for (c, r) in systems.iter().zip(states.iter_mut()) {
            let mut next = step(c, &mult, r, &draws, cfg.dt);
            let norm = next.norm();
            if !(norm <= cfg.overflow_guard) {
                return Err(Error::Divergence { step: m, norm });
            }
            if cfg.clip {
                next = cone.project_onto(&next)?;
            }
            *r = next;
        }
        observe(m, m as f64 * cfg.dt, &states);
    }
    Ok(states)
}

/// Simulates one path with the noise realization given by `noise.seed`.
/// Fails with [`Error::Divergence`] when the overflow guard fires.
pub fn simulate_path(
    s: &DiagonalSemigroup,
    c: &CoefficientSet,
    cone: &ConeSpec,
    noise: &NoiseSpec,
    cfg: &SimConfig,
    h0: &StateVec,
) -> Result<PathResult> {
    let mut min_margin = f64::INFINITY;
    let mut exit_time = None;
    let mut trajectory = cfg.record_every.map(|_| Trajectory::default());
    let every = cfg.record_every.unwrap_or(usize::MAX);
    let last = cfg.steps();
    let finals = integrate_coupled(s, &[c], cone, noise, cfg, h0, noise.seed, |m, t, states| {
        let r = &states[0];
        let margin = cone.min_margin(r);
        min_margin = min_margin.min(margin);
        if exit_time.is_none() && margin < -cfg.exit_tol {
            exit_time = Some(t);
        }
        if let Some(tr) = trajectory.as_mut() {
            if m % every == 0 || m == last {
                tr.times.push(t);
                tr.states.push(r.clone());
            }
        }
    })?;
    Ok(PathResult {
        seed: noise.seed,
        min_margin,
        exit_time,
        diverged_at: None,
        final_state: finals.into_iter().next(),
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::coefficients::JumpAtom;
    use crate::maps::Constant;

    fn vec(v: &[f64]) -> StateVec {
        StateVec::new(v.to_vec()).unwrap()
    }

    fn recorded(dt: f64, horizon: f64) -> SimConfig {
        SimConfig {
            record_every: Some(1),
            ..SimConfig::new(dt, horizon, 1)
        }
    }

    #[test]
    fn zero_coefficients_follow_the_semigroup() {
        let s = DiagonalSemigroup::new(vec![1.0, 2.5, -0.3]).unwrap();
        let c = CoefficientSet::zero(3, 2);
        let h0 = vec(&[1.0, -2.0, 0.5]);
        let noise = NoiseSpec::geometric(2, 5);
        let cfg = recorded(0.01, 1.0);
        let p = simulate_path(&s, &c, &ConeSpec::nonnegative(3), &noise, &cfg, &h0).unwrap();
        let tr = p.trajectory.unwrap();
        assert_eq!(tr.times.len(), 101);
        for (t, r) in tr.times.iter().zip(&tr.states) {
            let exact = s.apply(*t, &h0).unwrap();
            for k in 0..3 {
                assert!((r[k] - exact[k]).abs() <= 1e-13 * exact[k].abs().max(1.0), "t={t}");
            }
        }
    }

    #[test]
    fn constant_drift_converges_at_first_order() {
        let rates = [1.0, 3.0];
        let b = [0.7, -0.4];
        let h0 = [0.2, 1.0];
        let s = DiagonalSemigroup::new(rates.to_vec()).unwrap();
        let mut c = CoefficientSet::zero(2, 0);
        c.drift = Arc::new(Constant(vec(&b)));
        let noise = NoiseSpec::new(vec![], 0).unwrap();
        let exact: Vec<f64> = (0..2)
            .map(|k| b[k] / rates[k] + (h0[k] - b[k] / rates[k]) * (-rates[k]).exp())
            .collect();
        let err = |dt: f64| {
            let cfg = SimConfig::new(dt, 1.0, 1);
            let p = simulate_path(&s, &c, &ConeSpec::new(vec![0, 0]).unwrap(), &noise, &cfg, &vec(&h0)).unwrap();
            p.final_state.unwrap().distance(&StateVec::new(exact.clone()).unwrap())
        };
        let (e1, e2) = (err(1e-2), err(1e-3));
        let ratio = e1 / e2;
        assert!((8.0..12.0).contains(&ratio), "errors {e1} {e2}");
    }

    #[test]
    fn compensated_pure_jump_has_unbiased_mean() {
        let s = DiagonalSemigroup::new(vec![0.0, 0.0]).unwrap();
        let v = vec(&[1.0, -0.5]);
        let c = CoefficientSet::new(
            2,
            Arc::new(crate::maps::Zero),
            vec![],
            vec![JumpAtom {
                weight: 1.0,
                kernel: Arc::new(Constant(v)),
            }],
        )
        .unwrap();
        let h0 = vec(&[0.3, 0.1]);
        let cfg = SimConfig::new(0.01, 1.0, 1);
        let n = 10_000;
        let mut sum = [0.0; 2];
        let mut sq = [0.0; 2];
        for i in 0..n {
            let noise = NoiseSpec::new(vec![], super::super::noise::derive_seed(11, i)).unwrap();
            let r = simulate_path(&s, &c, &ConeSpec::new(vec![0, 0]).unwrap(), &noise, &cfg, &h0)
                .unwrap()
                .final_state
                .unwrap();
            for k in 0..2 {
                sum[k] += r[k];
                sq[k] += r[k] * r[k];
            }
        }
        for k in 0..2 {
            let mean = sum[k] / n as f64;
            let var = sq[k] / n as f64 - mean * mean;
            let se = (var / n as f64).sqrt();
            assert!((mean - h0[k]).abs() < 3.0 * se, "k={k}: {mean} vs {}", h0[k]);
        }
    }

    #[test]
    fn divergence_reports_step() {
        let s = DiagonalSemigroup::new(vec![-50.0]).unwrap();
        let c = CoefficientSet::zero(1, 0);
        let cfg = SimConfig::new(0.1, 10.0, 1);
        let noise = NoiseSpec::new(vec![], 0).unwrap();
        match simulate_path(&s, &c, &ConeSpec::nonnegative(1), &noise, &cfg, &vec(&[1.0])) {
            Err(Error::Divergence { step, norm }) => {
                // e^{5 m} > 1e12 first at m = 6
                assert_eq!(step, 6);
                assert!(norm > 1e12);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn exit_time_and_clip() {
        let s = DiagonalSemigroup::new(vec![0.0]).unwrap();
        let mut c = CoefficientSet::zero(1, 0);
        c.drift = Arc::new(Constant(vec(&[-1.0])));
        let cone = ConeSpec::nonnegative(1);
        let noise = NoiseSpec::new(vec![], 0).unwrap();
        let cfg = SimConfig::new(0.1, 1.0, 1).with_exit_tol(1e-9);
        let p = simulate_path(&s, &c, &cone, &noise, &cfg, &vec(&[0.5])).unwrap();
        assert!((p.exit_time.unwrap() - 0.6).abs() < 1e-12);
        assert!((p.min_margin + 0.5).abs() < 1e-12);
        let clipped = SimConfig { clip: true, ..cfg };
        let p = simulate_path(&s, &c, &cone, &noise, &clipped, &vec(&[0.5])).unwrap();
        assert_eq!(p.final_state.unwrap()[0], 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0.0, 1.0, 1).validate().is_err());
        assert!(SimConfig::new(0.3, 1.0, 1).validate().is_err());
        assert!(SimConfig::new(2.0, 1.0, 1).validate().is_err());
        assert!(SimConfig::new(0.25, 1.0, 0).validate().is_err());
        assert_eq!(SimConfig::new(1e-3, 1.0, 1).steps(), 1000);
        let s = DiagonalSemigroup::heat(2).unwrap();
        let c = CoefficientSet::zero(2, 1);
        let noise = NoiseSpec::geometric(2, 0);
        assert!(simulate_path(&s, &c, &ConeSpec::nonnegative(2), &noise, &SimConfig::new(0.5, 1.0, 1), &vec(&[1.0, 1.0])).is_err());
    }
}

//! Path ensembles and coupled stability runs.

use rayon::prelude::*;
use serde::Serialize;

use super::noise::{derive_seed, NoiseSpec};
use super::scheme::{integrate_coupled, simulate_path, PathResult, SimConfig};
use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::semigroup::DiagonalSemigroup;
use crate::space::{ConeSpec, StateVec};

/// Paths of one ensemble, in path-index order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathEnsemble {
    pub master_seed: u64,
    pub dt: f64,
    pub exit_tol: f64,
    pub paths: Vec<PathResult>,
}

impl PathEnsemble {
    /// Paths that did not hit the overflow guard.
    pub fn valid(&self) -> usize {
        self.paths.iter().filter(|p| p.diverged_at.is_none()).count()
    }

    pub fn diverged(&self) -> usize {
        self.paths.len() - self.valid()
    }

    pub fn exits(&self, tol: f64) -> usize {
        self.paths.iter().filter(|p| p.exited(tol)).count()
    }

    /// Fraction of non-diverged paths whose exit statistic is below `-tol`.
    pub fn exit_fraction(&self, tol: f64) -> f64 {
        match self.valid() {
            0 => 0.0,
            n => self.exits(tol) as f64 / n as f64,
        }
    }

    /// Binomial standard error of [`Self::exit_fraction`].
    pub fn exit_stderr(&self, tol: f64) -> f64 {
        match self.valid() {
            0 => 0.0,
            n => {
                let p = self.exit_fraction(tol);
                (p * (1.0 - p) / n as f64).sqrt()
            }
        }
    }
}

/// Runs `cfg.paths` independent paths. Path `i` uses the seed
/// `derive_seed(noise.seed, i)`, so results do not depend on the number of
/// worker threads. Diverged paths are recorded and excluded from exit
/// statistics.
pub fn run_ensemble(
    s: &DiagonalSemigroup,
    c: &CoefficientSet,
    cone: &ConeSpec,
    noise: &NoiseSpec,
    cfg: &SimConfig,
    h0: &StateVec,
) -> Result<PathEnsemble> {
    cfg.validate()?;
    let paths = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| {
            let path_noise = NoiseSpec {
                seed: derive_seed(noise.seed, i),
                ..noise.clone()
            };
            match simulate_path(s, c, cone, &path_noise, cfg, h0) {
                Ok(p) => Ok(p),
                Err(Error::Divergence { step, .. }) => Ok(PathResult {
                    seed: path_noise.seed,
                    min_margin: f64::NAN,
                    exit_time: None,
                    diverged_at: Some(step),
                    final_state: None,
                    trajectory: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathEnsemble {
        master_seed: noise.seed,
        dt: cfg.dt,
        exit_tol: cfg.exit_tol,
        paths,
    })
}

/// Monte Carlo estimate of `E sup_t |r_t - r^n_t|^2` for one approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityPoint {
    pub index: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Simulates the limit system and every approximation on shared noise and
/// estimates `E sup_{t <= T} |r_t - r^n_t|^2` on the time grid.
pub fn stability_experiment(
    s: &DiagonalSemigroup,
    c_limit: &CoefficientSet,
    c_seq: &[(usize, CoefficientSet)],
    cone: &ConeSpec,
    noise: &NoiseSpec,
    cfg: &SimConfig,
    h0: &StateVec,
) -> Result<Vec<StabilityPoint>> {
    cfg.validate()?;
    let mut systems = vec![c_limit];
    systems.extend(c_seq.iter().map(|(_, c)| c));
    let per_path = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut sup = vec![0.0_f64; c_seq.len()];
            integrate_coupled(s, &systems, cone, noise, cfg, h0, derive_seed(noise.seed, i), |_, _, states| {
                for (sup_n, r_n) in sup.iter_mut().zip(&states[1..]) {
                    *sup_n = sup_n.max(states[0].distance(r_n).powi(2));
                }
            })?;
            Ok(sup)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = per_path.len() as f64;
    Ok(c_seq
        .iter()
        .enumerate()
        .map(|(j, (index, _))| {
            let mean = per_path.iter().map(|v| v[j]).sum::<f64>() / m;
            let var = if m > 1.0 {
                per_path.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / (m - 1.0)
            } else {
                0.0
            };
            StabilityPoint {
                index: *index,
                mean,
                stderr: (var / m).sqrt(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::approx::{project_coefficients, truncate_noise};
    use crate::maps::{Constant, Diagonal, MeanReversion};

    fn setup() -> (DiagonalSemigroup, CoefficientSet, StateVec) {
        let s = DiagonalSemigroup::heat(4).unwrap();
        let mut c = CoefficientSet::zero(4, 0);
        c.drift = Arc::new(MeanReversion {
            kappa: 1.0,
            target: StateVec::new(vec![0.5, 0.25, 0.125, 0.0625]).unwrap(),
        });
        for j in 0..4 {
            c.vol.push(Arc::new(Diagonal::single(4, j, 0.3).unwrap()));
        }
        (s, c, StateVec::filled(4, 0.2))
    }

    #[test]
    fn ensembles_are_deterministic() {
        let (s, c, h0) = setup();
        let cone = ConeSpec::nonnegative(4);
        let noise = NoiseSpec::geometric(4, 42);
        let cfg = SimConfig::new(0.01, 0.5, 16);
        let a = run_ensemble(&s, &c, &cone, &noise, &cfg, &h0).unwrap();
        let b = run_ensemble(&s, &c, &cone, &noise, &cfg, &h0).unwrap();
        assert_eq!(a, b);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = one.install(|| run_ensemble(&s, &c, &cone, &noise, &cfg, &h0).unwrap());
        assert_eq!(a, serial);
        assert_ne!(a.paths[0].seed, a.paths[1].seed);
    }

    #[test]
    fn deterministic_inward_drift_never_exits() {
        let (s, mut c, h0) = setup();
        c.vol.clear();
        let e = run_ensemble(&s, &c, &ConeSpec::nonnegative(4), &NoiseSpec::new(vec![], 0).unwrap(), &SimConfig::new(0.01, 1.0, 8), &h0).unwrap();
        assert_eq!(e.exit_fraction(0.0), 0.0);
        assert_eq!(e.exit_stderr(0.0), 0.0);
    }

    #[test]
    fn exit_fraction_monotone_in_tolerance() {
        let (s, mut c, h0) = setup();
        c.vol.push(Arc::new(Constant(StateVec::new(vec![0.5, 0.0, 0.0, 0.0]).unwrap())));
        let noise = NoiseSpec::new(vec![0.5, 0.25, 0.125, 0.0625, 1.0], 3).unwrap();
        let e = run_ensemble(&s, &c, &ConeSpec::nonnegative(4), &noise, &SimConfig::new(0.01, 1.0, 64), &h0).unwrap();
        let fr: Vec<f64> = [0.0, 1e-8, 1e-3, 1e-2, 1e-1, 1.0].iter().map(|&t| e.exit_fraction(t)).collect();
        assert!(fr.windows(2).all(|w| w[1] <= w[0]), "{fr:?}");
        assert!(fr[0] > 0.0);
    }

    #[test]
    fn diverged_paths_are_recorded() {
        let s = DiagonalSemigroup::new(vec![-40.0]).unwrap();
        let c = CoefficientSet::zero(1, 0);
        let e = run_ensemble(&s, &c, &ConeSpec::nonnegative(1), &NoiseSpec::new(vec![], 0).unwrap(), &SimConfig::new(0.1, 1.0, 3), &StateVec::new(vec![1.0]).unwrap()).unwrap();
        assert_eq!(e.diverged(), 3);
        assert_eq!(e.exit_fraction(0.0), 0.0);
    }

    #[test]
    fn identical_approximations_give_zero() {
        let (s, c, h0) = setup();
        let seq: Vec<_> = [1, 2, 3].iter().map(|&n| (n, c.clone())).collect();
        let out = stability_experiment(&s, &c, &seq, &ConeSpec::nonnegative(4), &NoiseSpec::geometric(4, 1), &SimConfig::new(0.01, 0.5, 8), &h0).unwrap();
        assert!(out.iter().all(|p| p.mean == 0.0 && p.stderr == 0.0));
    }

    #[test]
    fn truncation_and_projection_converge() {
        let (s, c, h0) = setup();
        let cone = ConeSpec::nonnegative(4);
        let noise = NoiseSpec::geometric(4, 9);
        let cfg = SimConfig::new(0.01, 0.5, 32);
        let seq: Vec<_> = (1..=4).map(|n| (n, truncate_noise(&c, n).unwrap())).collect();
        let out = stability_experiment(&s, &c, &seq, &cone, &noise, &cfg, &h0).unwrap();
        assert_eq!(out[3].mean, 0.0);
        assert!(out.windows(2).all(|w| w[1].mean <= w[0].mean));

        let seq: Vec<_> = (1..=4).map(|n| (n, project_coefficients(&c, n).unwrap())).collect();
        let out = stability_experiment(&s, &c, &seq, &cone, &noise, &cfg, &h0).unwrap();
        assert_eq!(out[3].mean, 0.0);
        assert!(out[0].mean > out[1].mean && out[1].mean > out[2].mean);
    }
}

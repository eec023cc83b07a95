//! Approximation operators for coefficients: finite-dimensional projections,
//! retractions onto balls, noise truncation, boundary shifts, sup-inf
//! convolution, finite-dimensional mollification and the Stratonovich
//! correction, plus a numeric Lipschitz probe.

mod mollify;
mod phi;
mod rho;
mod supinf;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use mollify::{bump, mollify, mollify_monte_carlo, Mollified, MollifierParams, MAX_QUADRATURE_DIM};
pub use phi::{boundary_shift, dyadic_eps, phi_eps, BoundaryShift, PhiEps};
pub use rho::{
    stratonovich_correction, stratonovich_correction_analytic, stratonovich_correction_checked,
    RhoEstimate, DEFAULT_FD_STEP,
};
pub use supinf::{
    inf_convolve, sup_convolve, sup_inf_convolve, sup_inf_convolve_map, SearchSpec, SupInfParams,
};

use crate::coefficients::{CoefficientSet, JumpAtom};
use crate::error::{Error, Result};
use crate::maps::{SharedMap, VectorMap, Zero};
use crate::space::{project, retract, StateVec};

/// `Pi_n o f`.
#[derive(Debug, Clone)]
pub struct Projected {
    inner: SharedMap,
    n: usize,
}

impl VectorMap for Projected {
    fn eval(&self, h: &StateVec) -> StateVec {
        project(&self.inner.eval(h), self.n.min(h.dim())).expect("n clamped to dim")
    }

    fn directional_derivative(&self, h: &StateVec, v: &StateVec) -> Option<StateVec> {
        let d = self.inner.directional_derivative(h, v)?;
        project(&d, self.n.min(h.dim())).ok()
    }
}

pub fn compose_projection(f: SharedMap, n: usize, dim: usize) -> Result<SharedMap> {
    if n > dim {
        return Err(Error::Range { index: n, max: dim });
    }
    Ok(Arc::new(Projected { inner: f, n }))
}

/// `f o R_n`.
#[derive(Debug, Clone)]
pub struct Retracted {
    inner: SharedMap,
    radius: f64,
}

impl VectorMap for Retracted {
    fn eval(&self, h: &StateVec) -> StateVec {
        self.inner.eval(&retract(h, self.radius).expect("radius validated"))
    }

    fn directional_derivative(&self, h: &StateVec, v: &StateVec) -> Option<StateVec> {
        let norm = h.norm();
        if norm <= self.radius {
            return self.inner.directional_derivative(h, v);
        }
        // DR(h) v = (r / |h|) (v - <h, v> h / |h|^2)
        let mut dv = v.clone();
        dv.axpy(-h.dot(v) / (norm * norm), h);
        let dv = dv.scaled(self.radius / norm);
        self.inner.directional_derivative(&h.scaled(self.radius / norm), &dv)
    }
}

pub fn compose_retraction(f: SharedMap, radius: f64) -> Result<SharedMap> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("retraction radius must be > 0, got {radius}")));
    }
    Ok(Arc::new(Retracted { inner: f, radius }))
}

/// `f o Phi_n`.
#[derive(Debug, Clone)]
pub struct Shifted {
    inner: SharedMap,
    shift: BoundaryShift,
}

impl VectorMap for Shifted {
    fn eval(&self, h: &StateVec) -> StateVec {
        self.inner.eval(&self.shift.eval(h))
    }
}

pub fn compose_shift(f: SharedMap, shift: BoundaryShift) -> SharedMap {
    Arc::new(Shifted { inner: f, shift })
}

fn map_all(c: &CoefficientSet, g: impl Fn(SharedMap) -> Result<SharedMap>) -> Result<CoefficientSet> {
    let mut out = CoefficientSet::new(
        c.dim(),
        g(c.drift.clone())?,
        c.vol.iter().cloned().map(&g).collect::<Result<_>>()?,
        c.jumps
            .iter()
            .map(|a| {
                Ok(JumpAtom {
                    weight: a.weight,
                    kernel: g(a.kernel.clone())?,
                })
            })
            .collect::<Result<_>>()?,
    )?;
    out.lipschitz_hint = c.lipschitz_hint;
    Ok(out)
}

/// Replaces every coefficient `f` by `Pi_n o f`.
pub fn project_coefficients(c: &CoefficientSet, n: usize) -> Result<CoefficientSet> {
    map_all(c, |f| compose_projection(f, n, c.dim()))
}

/// Replaces every coefficient `f` by `f o R_n`.
pub fn retract_coefficients(c: &CoefficientSet, radius: f64) -> Result<CoefficientSet> {
    map_all(c, |f| compose_retraction(f, radius))
}

/// Replaces every coefficient `f` by `f o Phi_n`.
pub fn shift_coefficients(c: &CoefficientSet, shift: BoundaryShift) -> Result<CoefficientSet> {
    map_all(c, |f| Ok(compose_shift(f, shift)))
}

/// Noise truncation `T_n`: keeps volatility columns `0..n`, zeroes the rest.
pub fn truncate_noise(c: &CoefficientSet, n: usize) -> Result<CoefficientSet> {
    if n > c.columns() {
        return Err(Error::Range {
            index: n,
            max: c.columns(),
        });
    }
    let mut out = c.clone();
    for col in &mut out.vol[n..] {
        *col = Arc::new(Zero);
    }
    Ok(out)
}

/// Ball from which probe points are drawn uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: StateVec,
    pub radius: f64,
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, ball: &BallSpec) -> StateVec {
    let d = ball.center.dim();
    let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let dir = StateVec::from_vec_unchecked(dir);
    let norm = dir.norm().max(f64::MIN_POSITIVE);
    let r = ball.radius * rng.random::<f64>().powf(1.0 / d as f64);
    let mut p = ball.center.clone();
    p.axpy(r / norm, &dir);
    p
}

/// Largest difference quotient `|f(h) - f(g)| / |h - g|` over `pairs`
/// random pairs in the ball. Coincident pairs are skipped.
pub fn lipschitz_probe(f: &dyn VectorMap, pairs: usize, domain: &BallSpec, seed: u64) -> Result<f64> {
    if pairs == 0 {
        return Err(Error::Domain("lipschitz probe needs at least one pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    for _ in 0..pairs {
        let h = uniform_in_ball(&mut rng, domain);
        let g = uniform_in_ball(&mut rng, domain);
        let d = h.distance(&g);
        if d == 0.0 {
            continue;
        }
        best = best.max(f.eval(&h).distance(&f.eval(&g)) / d);
    }
    Ok(best)
}

/// Largest `|f(h)|` over `samples` random points of the ball.
pub fn sampled_sup_norm(f: &dyn VectorMap, samples: usize, domain: &BallSpec, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| f.eval(&uniform_in_ball(&mut rng, domain)).norm())
        .fold(0.0, f64::max)
}

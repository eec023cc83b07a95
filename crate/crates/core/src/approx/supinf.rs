//! Inf-convolution `f_lambda`, sup-convolution `f^mu` and their composition
//! `(f_lambda)^mu` for bounded Lipschitz scalar functions.
//!
//! The inner optimizations run over a box around the evaluation point whose
//! half-width is the localization radius of the optimizer: a minimizer `g`
//! of `f(g) + |h - g|^2 / (2 lambda)` satisfies
//! `|h - g| <= min(2 lambda L, sqrt(2 lambda osc(f)))`. Each coordinate is
//! searched on a coarse grid and refined by golden section; several
//! coordinate sweeps are made in dimension > 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::VectorMap;
use crate::space::StateVec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupInfParams {
    lambda: f64,
    mu: f64,
}

impl SupInfParams {
    /// Requires `0 < mu < lambda`.
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < lambda && lambda.is_finite()) {
            return Err(Error::Domain(format!(
                "sup-inf convolution needs 0 < mu < lambda, got lambda={lambda}, mu={mu}"
            )));
        }
        Ok(Self { lambda, mu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Lipschitz constant of the gradient of `(f_lambda)^mu`.
    pub fn gradient_lipschitz(&self) -> f64 {
        (1.0 / self.mu).max(1.0 / (self.lambda - self.mu))
    }
}

/// Search settings for the inner optimizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    /// Lipschitz constant of `f` (a bound suffices).
    pub lipschitz: f64,
    /// Bound on `sup f - inf f`.
    pub oscillation: f64,
    /// Coarse grid points per coordinate.
    pub grid_points: usize,
    /// Coordinate sweeps in dimension > 1.
    pub sweeps: usize,
    /// Overrides the computed localization radius.
    pub radius: Option<f64>,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            lipschitz: 1.0,
            oscillation: 2.0,
            grid_points: 201,
            sweeps: 4,
            radius: None,
        }
    }
}

impl SearchSpec {
    pub fn for_function(lipschitz: f64, oscillation: f64) -> Self {
        Self {
            lipschitz,
            oscillation,
            ..Self::default()
        }
    }

    /// Half-width of the search box for parameter `t` (lambda or mu).
    pub fn radius_for(&self, t: f64) -> f64 {
        if let Some(r) = self.radius {
            return r;
        }
        let by_lip = 2.0 * t * self.lipschitz;
        let by_osc = (2.0 * t * self.oscillation).sqrt();
        (1.05 * by_lip.min(by_osc)).max(1e-9)
    }
}

/// Grid local minima refined per coordinate pass.
const REFINED_BASINS: usize = 4;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimizes `obj` on `[lo, hi]` by golden section; `obj` is assumed
/// unimodal there.
fn golden_min(mut obj: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = obj(x1)?;
    let mut f2 = obj(x2)?;
    for _ in 0..200 {
        if hi - lo <= 1e-14 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = obj(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = obj(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Minimizes `obj` over the box `center +- radius` (each coordinate).
fn box_minimize(
    mut obj: impl FnMut(&StateVec) -> Result<f64>,
    center: &StateVec,
    radius: f64,
    search: &SearchSpec,
) -> Result<f64> {
    let points = search.grid_points.max(5);
    let step = 2.0 * radius / (points - 1) as f64;
    let sweeps = if center.dim() == 1 { 1 } else { search.sweeps.max(1) };
    let mut g = center.clone();
    let mut best = obj(&g)?;
    for _ in 0..sweeps {
        for i in 0..center.dim() {
            let lo = center[i] - radius;
            let mut trial = g.clone();
            let mut eval_at = |x: f64| -> Result<f64> {
                trial.coords_mut()[i] = x;
                obj(&trial)
            };
            let mut vals = Vec::with_capacity(points);
            for m in 0..points {
                vals.push(eval_at(lo + m as f64 * step)?);
            }
            // ties go to the grid point nearest the center
            let mid = points / 2;
            let mut best_idx = mid;
            for (m, &v) in vals.iter().enumerate() {
                if v < vals[best_idx] || (v == vals[best_idx] && m.abs_diff(mid) < best_idx.abs_diff(mid)) {
                    best_idx = m;
                }
            }
            if best_idx == 0 || best_idx == points - 1 {
                return Err(Error::Resolution {
                    suggested_radius: 2.0 * radius,
                });
            }
            // Nearly tied basins can swap order after refinement, so the
            // best few interior local minima of the grid are all refined.
            let mut local: Vec<usize> = (1..points - 1)
                .filter(|&m| vals[m] <= vals[m - 1] && vals[m] <= vals[m + 1])
                .collect();
            local.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            local.truncate(REFINED_BASINS);
            if !local.contains(&best_idx) {
                local.push(best_idx);
            }
            let (mut x, mut val) = (lo + best_idx as f64 * step, vals[best_idx]);
            for m in local {
                let x_grid = lo + m as f64 * step;
                let (xr, vr) = golden_min(&mut eval_at, x_grid - step, x_grid + step)?;
                if vr < val {
                    (x, val) = (xr, vr);
                }
            }
            if val <= best {
                best = val;
                g.coords_mut()[i] = x;
            }
        }
    }
    Ok(best)
}

/// `f_lambda(h) = inf_g f(g) + |h - g|^2 / (2 lambda)`.
pub fn inf_convolve(
    f: &dyn Fn(&StateVec) -> f64,
    lambda: f64,
    h: &StateVec,
    search: &SearchSpec,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be > 0, got {lambda}")));
    }
    let radius = search.radius_for(lambda);
    box_minimize(
        |g| Ok(f(g) + h.distance(g).powi(2) / (2.0 * lambda)),
        h,
        radius,
        search,
    )
}

/// `f^mu(h) = sup_g f(g) - |h - g|^2 / (2 mu)`.
pub fn sup_convolve(
    f: &dyn Fn(&StateVec) -> f64,
    mu: f64,
    h: &StateVec,
    search: &SearchSpec,
) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mu must be > 0, got {mu}")));
    }
    let radius = search.radius_for(mu);
    let neg = box_minimize(
        |g| Ok(-f(g) + h.distance(g).powi(2) / (2.0 * mu)),
        h,
        radius,
        search,
    )?;
    Ok(-neg)
}

/// Sup-inf convolution `(f_lambda)^mu(h)`.
pub fn sup_inf_convolve(
    f: &dyn Fn(&StateVec) -> f64,
    p: SupInfParams,
    h: &StateVec,
    search: &SearchSpec,
) -> Result<f64> {
    // f_lambda keeps the Lipschitz constant and oscillation of f, so the
    // same search spec localizes the outer supremum.
    let radius = search.radius_for(p.mu);
    let neg = box_minimize(
        |g| Ok(-inf_convolve(f, p.lambda, g, search)? + h.distance(g).powi(2) / (2.0 * p.mu)),
        h,
        radius,
        search,
    )?;
    Ok(-neg)
}

/// Componentwise sup-inf convolution of a vector map.
pub fn sup_inf_convolve_map(
    f: &dyn VectorMap,
    p: SupInfParams,
    h: &StateVec,
    search: &SearchSpec,
) -> Result<StateVec> {
    let coords = (0..h.dim())
        .map(|k| sup_inf_convolve(&|g: &StateVec| f.eval(g)[k], p, h, search))
        .collect::<Result<Vec<_>>>()?;
    StateVec::new(coords)
}

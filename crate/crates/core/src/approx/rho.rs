//! Stratonovich correction `rho(h) = 1/2 sum_j D sigma^j(h) sigma^j(h)`.

use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::space::StateVec;

pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central-difference estimate with its Richardson check.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoEstimate {
    pub rho: StateVec,
    /// `|rho(step) - rho(step / 2)|`, a proxy for the `O(step^2)` error.
    pub step_discrepancy: f64,
}

fn fd_rho(c: &CoefficientSet, h: &StateVec, fd_step: f64) -> Result<StateVec> {
    if !(fd_step > 0.0) {
        return Err(Error::Domain(format!("fd_step must be > 0, got {fd_step}")));
    }
    let mut rho = StateVec::zeros(h.dim());
    for col in &c.vol {
        let s = col.eval(h);
        let delta = fd_step / s.norm().max(1.0);
        let mut plus = h.clone();
        plus.axpy(delta, &s);
        let mut minus = h.clone();
        minus.axpy(-delta, &s);
        let diff = col.eval(&plus).sub(&col.eval(&minus));
        rho.axpy(0.25 / delta, &diff);
    }
    if !rho.is_finite() {
        return Err(Error::Numeric("finite-difference correction is not finite".into()));
    }
    Ok(rho)
}

/// Central-difference `rho(h)` with directional step `fd_step / max(1, |sigma^j(h)|)`.
pub fn stratonovich_correction(c: &CoefficientSet, h: &StateVec, fd_step: f64) -> Result<StateVec> {
    fd_rho(c, h, fd_step)
}

/// [`stratonovich_correction`] plus the discrepancy against half the step.
pub fn stratonovich_correction_checked(c: &CoefficientSet, h: &StateVec, fd_step: f64) -> Result<RhoEstimate> {
    let rho = fd_rho(c, h, fd_step)?;
    let half = fd_rho(c, h, fd_step / 2.0)?;
    Ok(RhoEstimate {
        step_discrepancy: rho.distance(&half),
        rho,
    })
}

/// `rho(h)` from the analytic directional derivatives, when every column
/// provides one.
pub fn stratonovich_correction_analytic(c: &CoefficientSet, h: &StateVec) -> Option<StateVec> {
    let mut rho = StateVec::zeros(h.dim());
    for col in &c.vol {
        let s = col.eval(h);
        rho.axpy(0.5, &col.directional_derivative(h, &s)?);
    }
    Some(rho)
}

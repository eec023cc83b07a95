//! Small-time tangency estimate `min_t d_K(S_t h + t Sigma(h)) / t`.

use crate::approx::stratonovich_correction;
use crate::coefficients::CoefficientSet;
use crate::error::{check_dim, Error, Result};
use crate::maps::VectorMap;
use crate::semigroup::{DiagonalSemigroup, LiminfGrid};
use crate::space::{ConeSpec, StateVec};

/// Minimum over the grid of `d_K(S_t h + t Sigma(h)) / t`; close to zero
/// when `Sigma(h)` points into `K` up to the semigroup's own motion.
pub fn ssnc_estimate(
    s: &DiagonalSemigroup,
    sigma: &dyn VectorMap,
    cone: &ConeSpec,
    h: &StateVec,
    grid: &LiminfGrid,
) -> Result<f64> {
    check_dim(s.dim(), h.dim())?;
    if !cone.contains(h, 0.0)? {
        return Err(Error::Domain("tangency estimate needs h in K".into()));
    }
    let v = sigma.eval(h);
    check_dim(h.dim(), v.dim())?;
    let mut best = f64::INFINITY;
    for t in grid.times() {
        let mut x = s.apply(t, h)?;
        x.axpy(t, &v);
        best = best.min(cone.distance(&x)? / t);
    }
    Ok(best)
}

/// `alpha(h) - rho(h) + sigma(h) u`, the drift whose tangency is tested for
/// the diffusion part of a coefficient set.
pub fn ssnc_direction(c: &CoefficientSet, h: &StateVec, u: &[f64], fd_step: f64) -> Result<StateVec> {
    let mut out = c.drift.eval(h);
    out.axpy(-1.0, &stratonovich_correction(c, h, fd_step)?);
    out.axpy(1.0, &c.vol_apply(h, u)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{Constant, Zero};

    #[test]
    fn zero_and_outward_directions() {
        let s = DiagonalSemigroup::heat(3).unwrap();
        let cone = ConeSpec::nonnegative(3);
        let h = StateVec::new(vec![0.0, 1.0, 0.5]).unwrap();
        let grid = LiminfGrid::down_to(1e-1, 1e-6);
        assert_eq!(ssnc_estimate(&s, &Zero, &cone, &h, &grid).unwrap(), 0.0);
        let out = Constant(StateVec::new(vec![-1.0, 0.0, 0.0]).unwrap());
        let est = ssnc_estimate(&s, &out, &cone, &h, &grid).unwrap();
        assert!((est - 1.0).abs() < 1e-12);
        let inward = Constant(StateVec::new(vec![1.0, -1.0, 0.0]).unwrap());
        assert_eq!(ssnc_estimate(&s, &inward, &cone, &h, &grid).unwrap(), 0.0);
        assert!(ssnc_estimate(&s, &Zero, &cone, &StateVec::filled(3, -1.0), &grid).is_err());
    }
}

//! The dead-zone shift `phi_eps` and the boundary-shift maps `Phi_n`.

use crate::error::{Error, Result};
use crate::maps::VectorMap;
use crate::space::StateVec;

/// `phi_eps(x) = (x + eps) 1{x <= -eps} + (x - eps) 1{x >= eps}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEps {
    eps: f64,
}

impl PhiEps {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Domain(format!("eps must be > 0, got {eps}")));
        }
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn apply(&self, x: f64) -> f64 {
        if x <= -self.eps {
            x + self.eps
        } else if x >= self.eps {
            x - self.eps
        } else {
            0.0
        }
    }
}

pub fn phi_eps(p: PhiEps, x: f64) -> f64 {
    p.apply(x)
}

/// The dyadic rule `eps_n = 2^{-n}`.
pub fn dyadic_eps(n: usize) -> f64 {
    0.5_f64.powi(n as i32)
}

/// `Phi_n(h) = sum_{k < n} phi_{eps(n)}(h_k) e_k`; coordinates from `n` on
/// are zeroed.
pub fn boundary_shift(n: usize, eps_rule: impl Fn(usize) -> f64, h: &StateVec) -> Result<StateVec> {
    BoundaryShift::new(n, eps_rule(n), h.dim())?.try_eval(h)
}

/// `Phi_n` as a map, so that coefficients can be composed with it.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryShift {
    n: usize,
    phi: PhiEps,
}

impl BoundaryShift {
    /// Lipschitz constant `2 ubc`, which is 2 for the orthonormal basis.
    pub const LIPSCHITZ: f64 = 2.0;

    pub fn new(n: usize, eps: f64, dim: usize) -> Result<Self> {
        if n > dim {
            return Err(Error::Range { index: n, max: dim });
        }
        Ok(Self {
            n,
            phi: PhiEps::new(eps)?,
        })
    }

    pub fn dyadic(n: usize, dim: usize) -> Result<Self> {
        Self::new(n, dyadic_eps(n), dim)
    }

    pub fn eps(&self) -> f64 {
        self.phi.eps()
    }

    /// Radius on which composed parallel maps stay parallel: `eps / L`.
    pub fn parallel_radius(&self) -> f64 {
        self.eps() / Self::LIPSCHITZ
    }

    fn try_eval(&self, h: &StateVec) -> Result<StateVec> {
        if self.n > h.dim() {
            return Err(Error::Range {
                index: self.n,
                max: h.dim(),
            });
        }
        Ok(self.eval(h))
    }
}

impl VectorMap for BoundaryShift {
    fn eval(&self, h: &StateVec) -> StateVec {
        let n = self.n.min(h.dim());
        let mut out = StateVec::zeros(h.dim());
        for (o, &x) in out.coords_mut()[..n].iter_mut().zip(h.coords()) {
            *o = self.phi.apply(x);
        }
        out
    }
}

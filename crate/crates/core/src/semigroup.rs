//! Diagonal `C_0`-semigroups `S_t h = (e^{-c_k t} h_k)`, their resolvents,
//! and the boundary set of pairs `(h^*, h)` on which the semigroup drift
//! `a(h^*, h) = liminf_{t -> 0} <h^*, S_t h> / t` is finite.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::space::{ConeSpec, Functional, StateVec};

/// Semigroup acting coordinatewise by `e^{-c_k t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSemigroup {
    rates: Vec<f64>,
    beta: f64,
}

impl DiagonalSemigroup {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::Domain("semigroup needs at least one rate".into()));
        }
        if rates.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numeric("semigroup rates must be finite".into()));
        }
        let beta = rates.iter().fold(0.0_f64, |b, &c| b.max(-c));
        Ok(Self { rates, beta })
    }

    /// Rates `c_k = k` (1-based), the heat-type example on `l^2`.
    pub fn heat(dim: usize) -> Result<Self> {
        Self::new((1..=dim).map(|k| k as f64).collect())
    }

    pub fn dim(&self) -> usize {
        self.rates.len()
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Growth constant: `|S_t| <= e^{beta t}`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Operator norm `max_k e^{-c_k t}`.
    pub fn operator_norm(&self, t: f64) -> f64 {
        self.rates.iter().map(|c| (-c * t).exp()).fold(0.0, f64::max)
    }

    /// Multipliers `e^{-c_k t}`; shared by the simulator so each step costs
    /// one multiplication per coordinate.
    pub fn multipliers(&self, t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("semigroup time must be >= 0, got {t}")));
        }
        Ok(self.rates.iter().map(|c| (-c * t).exp()).collect())
    }

    pub fn apply(&self, t: f64, h: &StateVec) -> Result<StateVec> {
        check_dim(self.dim(), h.dim())?;
        let m = self.multipliers(t)?;
        Ok(StateVec::from_vec_unchecked(
            h.coords().iter().zip(m).map(|(x, f)| x * f).collect(),
        ))
    }

    /// Generator `A h = (-c_k h_k)`; every element of `E_N` is in the domain.
    pub fn generator(&self, h: &StateVec) -> Result<StateVec> {
        check_dim(self.dim(), h.dim())?;
        Ok(StateVec::from_vec_unchecked(
            h.coords().iter().zip(&self.rates).map(|(x, c)| -c * x).collect(),
        ))
    }

    /// Resolvent `(lambda - A)^{-1} h`, closed form `h_k / (lambda + c_k)`.
    pub fn resolvent(&self, lambda: f64, h: &StateVec) -> Result<StateVec> {
        check_dim(self.dim(), h.dim())?;
        if !(lambda > self.beta) {
            return Err(Error::Domain(format!(
                "resolvent parameter {lambda} must exceed beta = {}",
                self.beta
            )));
        }
        Ok(StateVec::from_vec_unchecked(
            h.coords().iter().zip(&self.rates).map(|(x, c)| x / (lambda + c)).collect(),
        ))
    }

    /// Whether `K` is invariant under every `S_t`.
    ///
    /// A multiplier family acting coordinatewise preserves a coordinate cone
    /// iff every multiplier on a constrained coordinate is nonnegative, which
    /// is checked explicitly here rather than assumed.
    pub fn preserves_cone(&self, cone: &ConeSpec) -> Result<bool> {
        check_dim(self.dim(), cone.dim())?;
        Ok(cone
            .generators()
            .all(|f| self.rates[f.index].is_finite() && (-self.rates[f.index]).exp() > 0.0))
    }

    /// Decides membership of `(functional, h)` in the boundary set.
    ///
    /// For diagonal semigroups the rule is analytic: the pair belongs to the
    /// set iff `h_k = 0`, and then the liminf is `0`. The grid quotient is
    /// reported alongside as a cross-check.
    pub fn boundary_membership(
        &self,
        cone: &ConeSpec,
        functional: Functional,
        h: &StateVec,
        grid: &LiminfGrid,
    ) -> Result<BoundaryPoint> {
        check_dim(self.dim(), h.dim())?;
        check_dim(self.dim(), cone.dim())?;
        if !cone.is_generator(functional) {
            return Err(Error::Config(format!(
                "functional {functional:?} is not in the generating system"
            )));
        }
        if !cone.contains(h, 0.0)? {
            return Err(Error::Domain("boundary pair requires h in K".into()));
        }
        let c = self.rates[functional.index];
        let hk = functional.pair(h);
        let grid_estimate = grid.estimate(|t| (-c * t).exp() * hk / t);
        let a_value = if hk == 0.0 { Some(0.0) } else { None };
        Ok(BoundaryPoint {
            functional,
            point: h.clone(),
            a_value,
            grid_estimate,
        })
    }
}

/// Geometric grid `t_m = t0 * ratio^m` on which `liminf_{t -> 0}` is
/// estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiminfGrid {
    pub t0: f64,
    pub ratio: f64,
    pub points: usize,
    /// Tail minima above this value, still increasing toward `t -> 0`,
    /// are reported as infinite.
    pub infinity_threshold: f64,
}

impl Default for LiminfGrid {
    fn default() -> Self {
        Self {
            t0: 1e-1,
            ratio: 0.5,
            points: 40,
            infinity_threshold: 1e6,
        }
    }
}

/// Outcome of a grid liminf estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridEstimate {
    /// Minimum of the quotient over the small-`t` half of the grid.
    pub tail_min: f64,
    pub infinite: bool,
}

impl LiminfGrid {
    /// A grid running from `t0` down to `floor` (inclusive) by halving.
    pub fn down_to(t0: f64, floor: f64) -> Self {
        let points = ((t0 / floor).log2().ceil() as usize).max(1) + 1;
        Self {
            t0,
            ratio: 0.5,
            points,
            ..Self::default()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |m| self.t0 * self.ratio.powi(m as i32))
    }

    pub fn floor(&self) -> f64 {
        self.t0 * self.ratio.powi(self.points.saturating_sub(1) as i32)
    }

    /// Liminf estimate of `q(t)` as `t -> 0`: the minimum over the second
    /// half of the grid (smallest times). Declared infinite when that
    /// minimum exceeds the threshold and `q` is still growing at the floor.
    pub fn estimate(&self, q: impl Fn(f64) -> f64) -> GridEstimate {
        let values: Vec<f64> = self.times().map(&q).collect();
        let tail = &values[values.len() / 2..];
        let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let growing = match tail {
            [.., a, b] => b > a,
            _ => false,
        };
        GridEstimate {
            tail_min,
            infinite: tail_min > self.infinity_threshold && growing,
        }
    }

    /// Plain minimum of `q` over the whole grid.
    pub fn min_over(&self, q: impl Fn(f64) -> f64) -> f64 {
        self.times().map(q).fold(f64::INFINITY, f64::min)
    }
}

/// A pair `(h^*, h)` with the analytic and grid verdicts on membership in
/// the boundary set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub functional: Functional,
    pub point: StateVec,
    /// `Some(a)` when the pair is in the boundary set; `None` encodes `+inf`.
    pub a_value: Option<f64>,
    pub grid_estimate: GridEstimate,
}

impl BoundaryPoint {
    pub fn in_boundary_set(&self) -> bool {
        self.a_value.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> StateVec {
        StateVec::new(x.to_vec()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = DiagonalSemigroup::heat(2).unwrap();
        let h = v(&[1.0, 1.0]);
        assert_eq!(s.apply(0.0, &h).unwrap(), h);
        let r = s.apply(2f64.ln(), &h).unwrap();
        assert!((r[0] - 0.5).abs() < 1e-15);
        assert!((r[1] - 0.25).abs() < 1e-15);
        assert!(matches!(s.apply(-1.0, &h), Err(Error::Domain(_))));
    }

    #[test]
    fn beta_is_pseudo_contractivity_constant() {
        assert_eq!(DiagonalSemigroup::heat(3).unwrap().beta(), 0.0);
        let s = DiagonalSemigroup::new(vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(s.beta(), 2.0);
        assert!(s.operator_norm(0.3) <= (2.0_f64 * 0.3).exp() * (1.0 + 1e-15));
    }

    #[test]
    fn resolvent_example_and_errors() {
        let s = DiagonalSemigroup::new(vec![1.0, 2.0]).unwrap();
        let r = s.resolvent(1.0, &v(&[2.0, 3.0])).unwrap();
        assert_eq!(r, v(&[1.0, 1.0]));
        assert!(s.resolvent(0.0, &v(&[2.0, 3.0])).is_err());
        let neg = DiagonalSemigroup::new(vec![-1.0]).unwrap();
        assert!(neg.resolvent(1.0, &v(&[1.0])).is_err());
        assert!(neg.resolvent(1.5, &v(&[1.0])).is_ok());
    }

    #[test]
    fn resolvent_matches_laplace_quadrature() {
        // int_0^inf e^{-lambda t} S_t h dt by composite Simpson on [0, 40]
        let s = DiagonalSemigroup::new(vec![1.0, 2.0]).unwrap();
        let h = v(&[2.0, 3.0]);
        let lambda = 1.0;
        let n = 400_000;
        let upper = 40.0;
        let dt = upper / n as f64;
        let mut acc = [0.0; 2];
        for i in 0..=n {
            let t = i as f64 * dt;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let st = s.apply(t, &h).unwrap();
            for k in 0..2 {
                acc[k] += w * (-lambda * t).exp() * st[k];
            }
        }
        let r = s.resolvent(lambda, &h).unwrap();
        for k in 0..2 {
            assert!((acc[k] * dt / 3.0 - r[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn resolvent_large_lambda_limit() {
        let s = DiagonalSemigroup::heat(3).unwrap();
        let h = v(&[1.0, -2.0, 0.5]);
        let lambda = 1e8;
        let r = s.resolvent(lambda, &h).unwrap().scaled(lambda);
        assert!(r.distance(&h) < 1e-6);
    }

    #[test]
    fn preserves_coordinate_cones() {
        let k = ConeSpec::new(vec![1, -1, 0]).unwrap();
        assert!(DiagonalSemigroup::new(vec![3.0, -1.0, 0.0]).unwrap().preserves_cone(&k).unwrap());
        assert!(DiagonalSemigroup::new(vec![0.0; 3]).unwrap().preserves_cone(&k).unwrap());
        assert!(DiagonalSemigroup::heat(2).unwrap().preserves_cone(&k).is_err());
    }

    #[test]
    fn boundary_membership_rules() {
        let s = DiagonalSemigroup::heat(2).unwrap();
        let k = ConeSpec::nonnegative(2);
        let grid = LiminfGrid::default();
        let f = Functional::new(1, 0).unwrap();

        let on_face = s.boundary_membership(&k, f, &v(&[0.0, 1.0]), &grid).unwrap();
        assert!(on_face.in_boundary_set());
        assert_eq!(on_face.a_value, Some(0.0));
        assert_eq!(on_face.grid_estimate.tail_min, 0.0);
        assert!(!on_face.grid_estimate.infinite);

        let interior = s.boundary_membership(&k, f, &v(&[1.0, 1.0]), &grid).unwrap();
        assert!(!interior.in_boundary_set());
        assert!(interior.grid_estimate.infinite);
        // the quotient grows like 1/t
        let q = |t: f64| (-t).exp() / t;
        assert!(q(1e-6) > 1e5 * q(1e-1) / 10.0);

        let bad = Functional::new(-1, 0).unwrap();
        assert!(matches!(
            s.boundary_membership(&k, bad, &v(&[0.0, 1.0]), &grid),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn grid_down_to_reaches_floor() {
        let g = LiminfGrid::down_to(1e-1, 1e-6);
        assert!(g.floor() <= 1e-6);
        assert!(g.floor() > 0.25e-6);
    }
}

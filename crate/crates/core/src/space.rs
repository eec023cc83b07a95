//! Truncated sequence-space vectors, coordinate cones and the elementary
//! geometry on them.
//!
//! A [`StateVec`] holds the first `N` coordinates of an element of `l^2`
//! with respect to the orthonormal coordinate basis; every coordinate
//! beyond `N` is zero. Cones are generated by signed coordinate
//! functionals `theta * e_k^*`, see [`ConeSpec`].

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Element of the Galerkin space `E_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateVecRepr", into = "StateVecRepr")]
pub struct StateVec {
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateVecRepr {
    dim: usize,
    coords: Vec<f64>,
}

impl TryFrom<StateVecRepr> for StateVec {
    type Error = Error;

    fn try_from(repr: StateVecRepr) -> Result<Self> {
        check_dim(repr.dim, repr.coords.len())?;
        StateVec::new(repr.coords)
    }
}

impl From<StateVec> for StateVecRepr {
    fn from(v: StateVec) -> Self {
        StateVecRepr {
            dim: v.dim(),
            coords: v.coords,
        }
    }
}

impl StateVec {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("state vector must have dim >= 1".into()));
        }
        if let Some(i) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!("coordinate {i} is not finite")));
        }
        Ok(Self { coords })
    }

    /// Builds a vector without the finiteness check. Used on hot paths where
    /// the caller guards divergence itself.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
        }
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Self {
            coords: vec![value; dim],
        }
    }

    /// The unit vector `e_k` (0-based `k`).
    pub fn unit(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Range {
                index: k,
                max: dim.saturating_sub(1),
            });
        }
        let mut v = Self::zeros(dim);
        v.coords[k] = 1.0;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &StateVec) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> StateVec {
        StateVec::from_vec_unchecked(self.coords.iter().map(|x| factor * x).collect())
    }

    /// `self + other`. Panics on dimension mismatch; use [`StateVec::try_add`]
    /// when the dimensions are not known to agree.
    pub fn add(&self, other: &StateVec) -> StateVec {
        self.try_add(other).expect("dimension mismatch in add")
    }

    pub fn sub(&self, other: &StateVec) -> StateVec {
        self.try_sub(other).expect("dimension mismatch in sub")
    }

    pub fn try_add(&self, other: &StateVec) -> Result<StateVec> {
        check_dim(self.dim(), other.dim())?;
        Ok(StateVec::from_vec_unchecked(
            self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn try_sub(&self, other: &StateVec) -> Result<StateVec> {
        check_dim(self.dim(), other.dim())?;
        Ok(StateVec::from_vec_unchecked(
            self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &StateVec) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += factor * b;
        }
    }

    pub fn distance(&self, other: &StateVec) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl std::ops::Index<usize> for StateVec {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.coords[k]
    }
}

/// Coordinate projection `Pi_n`: keeps the first `n` coordinates.
pub fn project(h: &StateVec, n: usize) -> Result<StateVec> {
    if n > h.dim() {
        return Err(Error::Range {
            index: n,
            max: h.dim(),
        });
    }
    let mut out = h.clone();
    out.coords[n..].iter_mut().for_each(|x| *x = 0.0);
    Ok(out)
}

/// Metric projection onto the closed ball of radius `radius`:
/// `R_n(h) = min(1, n / |h|) h`.
pub fn retract(h: &StateVec, radius: f64) -> Result<StateVec> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("retraction radius must be > 0, got {radius}")));
    }
    let norm = h.norm();
    if norm <= radius {
        Ok(h.clone())
    } else {
        Ok(h.scaled(radius / norm))
    }
}

/// A signed coordinate functional `theta * e_k^*` with `theta` in `{-1, +1}`
/// and 0-based `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Functional {
    pub sign: i8,
    pub index: usize,
}

impl Functional {
    pub fn new(sign: i8, index: usize) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Domain(format!("functional sign must be +1 or -1, got {sign}")));
        }
        Ok(Self { sign, index })
    }

    /// `<theta e_k^*, h> = theta h_k`.
    pub fn pair(&self, h: &StateVec) -> f64 {
        f64::from(self.sign) * h[self.index]
    }

    pub fn theta(&self) -> f64 {
        f64::from(self.sign)
    }
}

/// Closed convex cone `K = { h : theta_k h_k >= 0 for every constrained k }`.
///
/// `signs[k]` is `+1` or `-1` when `theta_k e_k^*` belongs to the generating
/// system, and `0` when coordinate `k` is unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConeRepr", into = "ConeRepr")]
pub struct ConeSpec {
    signs: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeRepr {
    signs: Vec<i8>,
}

impl TryFrom<ConeRepr> for ConeSpec {
    type Error = Error;

    fn try_from(repr: ConeRepr) -> Result<Self> {
        ConeSpec::new(repr.signs)
    }
}

impl From<ConeSpec> for ConeRepr {
    fn from(c: ConeSpec) -> Self {
        ConeRepr { signs: c.signs }
    }
}

impl ConeSpec {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::Domain("cone must have dim >= 1".into()));
        }
        if let Some(s) = signs.iter().find(|s| !matches!(s, -1..=1)) {
            return Err(Error::Domain(format!("cone sign must be -1, 0 or +1, got {s}")));
        }
        Ok(Self { signs })
    }

    /// The nonnegative orthant of dimension `dim`.
    pub fn nonnegative(dim: usize) -> Self {
        Self {
            signs: vec![1; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// The generating system `G*`, ordered by coordinate.
    pub fn generators(&self) -> impl Iterator<Item = Functional> + '_ {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, s)| **s != 0)
            .map(|(index, &sign)| Functional { sign, index })
    }

    pub fn is_generator(&self, f: Functional) -> bool {
        self.signs.get(f.index).copied() == Some(f.sign)
    }

    /// True iff `theta_k h_k >= -tol` for every constrained `k`.
    pub fn contains(&self, h: &StateVec, tol: f64) -> Result<bool> {
        check_dim(self.dim(), h.dim())?;
        Ok(self.min_margin(h) >= -tol)
    }

    /// Minimum of the signed face margins `theta_k h_k`; `+inf` for the
    /// unconstrained cone.
    pub fn min_margin(&self, h: &StateVec) -> f64 {
        self.signs
            .iter()
            .zip(h.coords())
            .filter(|(s, _)| **s != 0)
            .map(|(&s, &x)| f64::from(s) * x)
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance `d_K(h)`; closed form for coordinate cones (clip violating
    /// coordinates).
    pub fn distance(&self, h: &StateVec) -> Result<f64> {
        check_dim(self.dim(), h.dim())?;
        Ok(self
            .signs
            .iter()
            .zip(h.coords())
            .filter(|(&s, &x)| s != 0 && f64::from(s) * x < 0.0)
            .map(|(_, &x)| x * x)
            .fold(0.0, |a, x| a + x)
            .sqrt())
    }

    /// Metric projection onto `K`.
    pub fn project_onto(&self, h: &StateVec) -> Result<StateVec> {
        check_dim(self.dim(), h.dim())?;
        let coords = self
            .signs
            .iter()
            .zip(h.coords())
            .map(|(&s, &x)| if s != 0 && f64::from(s) * x < 0.0 { 0.0 } else { x })
            .collect();
        Ok(StateVec::from_vec_unchecked(coords))
    }

    /// Cone order: `g <=_K h` iff `h - g` lies in `K`.
    pub fn leq(&self, g: &StateVec, h: &StateVec) -> Result<bool> {
        check_dim(self.dim(), g.dim())?;
        let diff = h.try_sub(g)?;
        self.contains(&diff, 0.0)
    }
}

/// Basis constant and unconditional basis constant of the coordinate basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisConstants {
    pub bc: f64,
    pub ubc: f64,
}

impl BasisConstants {
    /// Both constants equal 1 for an orthonormal basis.
    pub const ORTHONORMAL: BasisConstants = BasisConstants { bc: 1.0, ubc: 1.0 };
}

//! Vector fields on `E_N` used as drift, volatility columns and jump kernels.
//!
//! Coefficients are evaluable maps behind the [`VectorMap`] trait. The
//! built-in parameterized families are described by [`MapSpec`], the form
//! they take in experiment configs.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::space::StateVec;

/// An evaluable map `E_N -> E_N`.
///
/// Implementations must be pure: the simulator and the checkers evaluate
/// them concurrently.
pub trait VectorMap: Send + Sync + fmt::Debug {
    fn eval(&self, h: &StateVec) -> StateVec;

    /// Analytic directional derivative `Df(h) v`, when the family knows it.
    fn directional_derivative(&self, _h: &StateVec, _v: &StateVec) -> Option<StateVec> {
        None
    }
}

pub type SharedMap = Arc<dyn VectorMap>;

/// The zero map.
#[derive(Debug, Clone, Copy)]
pub struct Zero;

impl VectorMap for Zero {
    fn eval(&self, h: &StateVec) -> StateVec {
        StateVec::zeros(h.dim())
    }

    fn directional_derivative(&self, h: &StateVec, _v: &StateVec) -> Option<StateVec> {
        Some(StateVec::zeros(h.dim()))
    }
}

#[derive(Debug, Clone)]
pub struct Constant(pub StateVec);

impl VectorMap for Constant {
    fn eval(&self, _h: &StateVec) -> StateVec {
        self.0.clone()
    }

    fn directional_derivative(&self, h: &StateVec, _v: &StateVec) -> Option<StateVec> {
        Some(StateVec::zeros(h.dim()))
    }
}

/// `h -> M h + b` with a dense row-major `M`.
#[derive(Debug, Clone)]
pub struct Affine {
    matrix: Vec<Vec<f64>>,
    offset: StateVec,
}

impl Affine {
    pub fn new(matrix: Vec<Vec<f64>>, offset: StateVec) -> Result<Self> {
        let n = offset.dim();
        check_dim(n, matrix.len())?;
        for row in &matrix {
            check_dim(n, row.len())?;
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::Numeric("affine matrix must be finite".into()));
            }
        }
        Ok(Self { matrix, offset })
    }

    fn mat_vec(&self, v: &StateVec) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v.coords()).map(|(a, x)| a * x).sum())
            .collect()
    }
}

impl VectorMap for Affine {
    fn eval(&self, h: &StateVec) -> StateVec {
        let mut out = StateVec::from_vec_unchecked(self.mat_vec(h));
        out.axpy(1.0, &self.offset);
        out
    }

    fn directional_derivative(&self, _h: &StateVec, v: &StateVec) -> Option<StateVec> {
        Some(StateVec::from_vec_unchecked(self.mat_vec(v)))
    }
}

/// `h -> kappa (b - h)`.
#[derive(Debug, Clone)]
pub struct MeanReversion {
    pub kappa: f64,
    pub target: StateVec,
}

impl VectorMap for MeanReversion {
    fn eval(&self, h: &StateVec) -> StateVec {
        self.target.sub(h).scaled(self.kappa)
    }

    fn directional_derivative(&self, _h: &StateVec, v: &StateVec) -> Option<StateVec> {
        Some(v.scaled(-self.kappa))
    }
}

/// Coordinatewise proportional map `h -> (s_k h_k)`.
#[derive(Debug, Clone)]
pub struct Diagonal {
    scale: Vec<f64>,
}

impl Diagonal {
    pub fn new(scale: Vec<f64>) -> Self {
        Self { scale }
    }

    /// Acts on a single coordinate: `(s h_k) e_k`.
    pub fn single(dim: usize, coord: usize, s: f64) -> Result<Self> {
        if coord >= dim {
            return Err(Error::Range {
                index: coord,
                max: dim.saturating_sub(1),
            });
        }
        let mut scale = vec![0.0; dim];
        scale[coord] = s;
        Ok(Self { scale })
    }
}

impl VectorMap for Diagonal {
    fn eval(&self, h: &StateVec) -> StateVec {
        StateVec::from_vec_unchecked(h.coords().iter().zip(&self.scale).map(|(x, s)| s * x).collect())
    }

    fn directional_derivative(&self, _h: &StateVec, v: &StateVec) -> Option<StateVec> {
        Some(self.eval(v))
    }
}

/// Coordinatewise piecewise-linear lookup `h -> (T(h_k))`, constant beyond
/// the table ends.
#[derive(Debug, Clone)]
pub struct CoordinateTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl CoordinateTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_dim(xs.len(), ys.len())?;
        if xs.len() < 2 {
            return Err(Error::Config("table needs at least two knots".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("table knots must be strictly increasing".into()));
        }
        if xs.iter().chain(&ys).any(|x| !x.is_finite()) {
            return Err(Error::Numeric("table entries must be finite".into()));
        }
        Ok(Self { xs, ys })
    }

    fn segment(&self, x: f64) -> Option<usize> {
        if x <= self.xs[0] || x >= self.xs[self.xs.len() - 1] {
            return None;
        }
        Some(self.xs.partition_point(|&k| k <= x) - 1)
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.segment(x) {
            None if x <= self.xs[0] => self.ys[0],
            None => self.ys[self.ys.len() - 1],
            Some(i) => {
                let w = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
                self.ys[i] + w * (self.ys[i + 1] - self.ys[i])
            }
        }
    }

    fn slope(&self, x: f64) -> f64 {
        match self.segment(x) {
            None => 0.0,
            Some(i) => (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i]),
        }
    }
}

impl VectorMap for CoordinateTable {
    fn eval(&self, h: &StateVec) -> StateVec {
        StateVec::from_vec_unchecked(h.coords().iter().map(|&x| self.value(x)).collect())
    }

    fn directional_derivative(&self, h: &StateVec, v: &StateVec) -> Option<StateVec> {
        Some(StateVec::from_vec_unchecked(
            h.coords().iter().zip(v.coords()).map(|(&x, &d)| self.slope(x) * d).collect(),
        ))
    }
}

/// Tent bump `h -> amplitude * (1 - |h - c| / r)_+ * direction`.
#[derive(Debug, Clone)]
pub struct Bump {
    pub center: StateVec,
    pub radius: f64,
    pub direction: StateVec,
    pub amplitude: f64,
}

impl VectorMap for Bump {
    fn eval(&self, h: &StateVec) -> StateVec {
        let w = (1.0 - h.distance(&self.center) / self.radius).max(0.0);
        self.direction.scaled(self.amplitude * w)
    }
}

/// Pointwise sum of maps.
#[derive(Debug, Clone)]
pub struct Sum(pub Vec<SharedMap>);

impl VectorMap for Sum {
    fn eval(&self, h: &StateVec) -> StateVec {
        let mut out = StateVec::zeros(h.dim());
        for term in &self.0 {
            out.axpy(1.0, &term.eval(h));
        }
        out
    }

    fn directional_derivative(&self, h: &StateVec, v: &StateVec) -> Option<StateVec> {
        let mut out = StateVec::zeros(h.dim());
        for term in &self.0 {
            out.axpy(1.0, &term.directional_derivative(h, v)?);
        }
        Some(out)
    }
}

/// Adapter for in-process closures.
pub struct FnMap<F>(pub F);

impl<F> fmt::Debug for FnMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnMap")
    }
}

impl<F> VectorMap for FnMap<F>
where
    F: Fn(&StateVec) -> StateVec + Send + Sync,
{
    fn eval(&self, h: &StateVec) -> StateVec {
        (self.0)(h)
    }
}

/// A scalar or a per-coordinate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scale {
    Uniform(f64),
    PerCoord(Vec<f64>),
}

/// Config description of a built-in map family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Zero,
    Constant {
        value: Vec<f64>,
    },
    /// `M h + offset`; a missing offset is zero.
    Affine {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Vec<f64>>,
    },
    MeanReversion {
        kappa: f64,
        b: Vec<f64>,
    },
    /// `(s_k h_k)`. A scalar scale acts on `coord` when given; otherwise a
    /// volatility column acts on the coordinate matching its column index
    /// and a drift or jump kernel acts on every coordinate.
    Proportional {
        scale: Scale,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coord: Option<usize>,
    },
    Table {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
    Bump {
        center: Vec<f64>,
        radius: f64,
        direction: Vec<f64>,
        amplitude: f64,
    },
    Sum {
        terms: Vec<MapSpec>,
    },
}

impl MapSpec {
    /// Builds the map on `E_dim`. `column` is the volatility column index
    /// this map is used for, if any.
    pub fn build(&self, dim: usize, column: Option<usize>) -> Result<SharedMap> {
        let vec_of = |x: &[f64], what: &str| -> Result<StateVec> {
            if x.len() != dim {
                return Err(Error::Config(format!(
                    "{what} has length {}, expected dim {dim}",
                    x.len()
                )));
            }
            StateVec::new(x.to_vec())
        };
        Ok(match self {
            MapSpec::Zero => Arc::new(Zero),
            MapSpec::Constant { value } => Arc::new(Constant(vec_of(value, "constant value")?)),
            MapSpec::Affine { matrix, offset } => {
                let offset = match offset {
                    Some(o) => vec_of(o, "affine offset")?,
                    None => StateVec::zeros(dim),
                };
                Arc::new(Affine::new(matrix.clone(), offset).map_err(|e| Error::Config(e.to_string()))?)
            }
            MapSpec::MeanReversion { kappa, b } => {
                if !kappa.is_finite() {
                    return Err(Error::Config("kappa must be finite".into()));
                }
                Arc::new(MeanReversion {
                    kappa: *kappa,
                    target: vec_of(b, "mean-reversion target b")?,
                })
            }
            MapSpec::Proportional { scale, coord } => match (scale, coord.or(column)) {
                (Scale::PerCoord(s), _) => Arc::new(Diagonal::new(vec_of(s, "proportional scale")?.into_coords())),
                (Scale::Uniform(s), Some(k)) => Arc::new(Diagonal::single(dim, k, *s)?),
                (Scale::Uniform(s), None) => Arc::new(Diagonal::new(vec![*s; dim])),
            },
            MapSpec::Table { xs, ys } => Arc::new(CoordinateTable::new(xs.clone(), ys.clone())?),
            MapSpec::Bump {
                center,
                radius,
                direction,
                amplitude,
            } => {
                if !(*radius > 0.0) {
                    return Err(Error::Config("bump radius must be > 0".into()));
                }
                Arc::new(Bump {
                    center: vec_of(center, "bump center")?,
                    radius: *radius,
                    direction: vec_of(direction, "bump direction")?,
                    amplitude: *amplitude,
                })
            }
            MapSpec::Sum { terms } => Arc::new(Sum(
                terms
                    .iter()
                    .map(|t| t.build(dim, column))
                    .collect::<Result<_>>()?,
            )),
        })
    }

    /// Whether the family is given by a user table (looser checker tolerance).
    pub fn uses_table(&self) -> bool {
        match self {
            MapSpec::Table { .. } => true,
            MapSpec::Sum { terms } => terms.iter().any(MapSpec::uses_table),
            _ => false,
        }
    }
}

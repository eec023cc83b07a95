//! Convolution of a map against the radial bump `phi(a |g|)` over `E_n`.
//!
//! `Sigma_n(h) = a^n / c_n * int_{E_n} f(h - g) phi(a |g|) dg` with
//! `c_n = int_{E_n} phi(|g|) dg`. After substituting `g = u / a` both
//! integrals run over the unit cube and share one tensor Gauss-Legendre
//! rule, so constants are reproduced up to summation rounding.

use gauss_quad::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::maps::{SharedMap, VectorMap};
use crate::space::StateVec;

/// Largest `n` handled by the tensor rule.
pub const MAX_QUADRATURE_DIM: usize = 3;

/// Steepness of the transition in [`bump`]; keeps `|phi'| <= 3`.
const TRANSITION_STEEPNESS: f64 = 0.6;

fn smooth_zero(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-TRANSITION_STEEPNESS / x).exp()
    }
}

/// Smooth even bump with values in `[0, 1]`: equal to 1 on `|t| <= 1/2`,
/// 0 on `|t| >= 1`, and monotone in between.
pub fn bump(t: f64) -> f64 {
    let s = 2.0 * (1.0 - t.abs());
    if s >= 1.0 {
        1.0
    } else if s <= 0.0 {
        0.0
    } else {
        let a = smooth_zero(s);
        a / (a + smooth_zero(1.0 - s))
    }
}

/// Quadrature and bandwidth for [`mollify`].
#[derive(Debug, Clone)]
pub struct MollifierParams {
    n: usize,
    a_n: f64,
    /// Cube nodes `u` and products `w_u phi(|u|)`, zero-weight nodes dropped.
    nodes: Vec<(Vec<f64>, f64)>,
    c_n: f64,
}

impl MollifierParams {
    /// Tensor rule with 33 points per axis.
    pub fn new(n: usize, a_n: f64) -> Result<Self> {
        Self::with_points(n, a_n, 33)
    }

    pub fn with_points(n: usize, a_n: f64, points_per_axis: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("mollifier dimension must be >= 1".into()));
        }
        if n > MAX_QUADRATURE_DIM {
            return Err(Error::UnsupportedDimension {
                dim: n,
                max: MAX_QUADRATURE_DIM,
            });
        }
        if !(a_n > 0.0) || !a_n.is_finite() {
            return Err(Error::Domain(format!("bandwidth a_n must be > 0, got {a_n}")));
        }
        let rule = GaussLegendre::new(points_per_axis)
            .map_err(|_| Error::Domain("quadrature needs at least 2 points per axis".into()))?;
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // enforce exact mirror symmetry so odd moments cancel
        let m = pairs.len();
        for i in 0..m / 2 {
            let x = 0.5 * (pairs[m - 1 - i].0 - pairs[i].0);
            let w = 0.5 * (pairs[m - 1 - i].1 + pairs[i].1);
            pairs[i] = (-x, w);
            pairs[m - 1 - i] = (x, w);
        }
        if m % 2 == 1 {
            pairs[m / 2].0 = 0.0;
        }

        let mut nodes = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let u: Vec<f64> = idx.iter().map(|&i| pairs[i].0).collect();
            let w: f64 = idx.iter().map(|&i| pairs[i].1).product();
            let r = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            let weight = w * bump(r);
            if weight > 0.0 {
                nodes.push((u, weight));
            }
            let mut d = 0;
            while d < n {
                idx[d] += 1;
                if idx[d] < m {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == n {
                break;
            }
        }
        let c_n = nodes.iter().map(|(_, w)| w).sum();
        Ok(Self { n, a_n, nodes, c_n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_n(&self) -> f64 {
        self.a_n
    }

    /// Quadrature value of `int_{E_n} phi(|g|) dg`.
    pub fn c_n(&self) -> f64 {
        self.c_n
    }

    /// Radius of the kernel support, `1 / a_n`.
    pub fn support_radius(&self) -> f64 {
        1.0 / self.a_n
    }
}

/// Mollified value `Sigma_n(h)`.
pub fn mollify(f: &dyn VectorMap, p: &MollifierParams, h: &StateVec) -> Result<StateVec> {
    if h.dim() < p.n {
        return Err(Error::Range {
            index: p.n,
            max: h.dim(),
        });
    }
    let mut acc = StateVec::zeros(h.dim());
    let mut shifted = h.clone();
    for (u, w) in &p.nodes {
        for (k, uk) in u.iter().enumerate() {
            shifted.coords_mut()[k] = h[k] - uk / p.a_n;
        }
        acc.axpy(*w, &f.eval(&shifted));
    }
    let out = acc.scaled(1.0 / p.c_n);
    if !out.is_finite() {
        return Err(Error::Numeric("mollified value is not finite".into()));
    }
    Ok(out)
}

/// Monte Carlo estimate of `Sigma_n(h)` for any `n`, drawing `g` from the
/// normalized kernel by rejection from the cube. Returns the estimate and
/// the per-coordinate standard errors.
pub fn mollify_monte_carlo(
    f: &dyn VectorMap,
    n: usize,
    a_n: f64,
    h: &StateVec,
    samples: usize,
    seed: u64,
) -> Result<(StateVec, Vec<f64>)> {
    if n == 0 || n > h.dim() {
        return Err(Error::Range { index: n, max: h.dim() });
    }
    if samples < 2 {
        return Err(Error::Domain("need at least two Monte Carlo samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = h.dim();
    let mut sum = vec![0.0; dim];
    let mut sum_sq = vec![0.0; dim];
    let mut shifted = h.clone();
    let mut accepted = 0;
    while accepted < samples {
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rng.random::<f64>() >= bump(r) {
            continue;
        }
        for (k, uk) in u.iter().enumerate() {
            shifted.coords_mut()[k] = h[k] - uk / a_n;
        }
        let y = f.eval(&shifted);
        for k in 0..dim {
            sum[k] += y[k];
            sum_sq[k] += y[k] * y[k];
        }
        accepted += 1;
    }
    let m = samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let stderr = sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, mu)| ((sq / m - mu * mu).max(0.0) * m / (m - 1.0) / m).sqrt())
        .collect();
    Ok((StateVec::new(mean)?, stderr))
}

/// `Sigma_n` as a map.
#[derive(Debug, Clone)]
pub struct Mollified {
    inner: SharedMap,
    params: MollifierParams,
}

impl Mollified {
    pub fn new(inner: SharedMap, params: MollifierParams, dim: usize) -> Result<Self> {
        if params.n > dim {
            return Err(Error::Range {
                index: params.n,
                max: dim,
            });
        }
        Ok(Self { inner, params })
    }
}

impl VectorMap for Mollified {
    fn eval(&self, h: &StateVec) -> StateVec {
        mollify(self.inner.as_ref(), &self.params, h).expect("dimension validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::maps::{Affine, Constant, FnMap};

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(0.5), 1.0);
        assert_eq!(bump(-0.4), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(1.7), 0.0);
        assert!((bump(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        let mut max_slope = 0.0_f64;
        let dt = 1e-5;
        for i in 1..=100_000 {
            let t = i as f64 * dt;
            let b = bump(t);
            assert!(b <= prev && (0.0..=1.0).contains(&b));
            max_slope = max_slope.max((prev - b) / dt);
            prev = b;
        }
        assert!(max_slope <= 3.0, "max |phi'| = {max_slope}");
    }

    #[test]
    fn constants_and_linear_maps_reproduced() {
        let p = MollifierParams::new(2, 8.0).unwrap();
        let h = StateVec::new(vec![0.3, -1.2, 4.0]).unwrap();
        let c = Constant(StateVec::new(vec![1.5, -2.0, 0.25]).unwrap());
        assert!(mollify(&c, &p, &h).unwrap().distance(&c.0) < 1e-10);

        let lin = Affine::new(
            vec![vec![1.0, 2.0, 0.0], vec![-3.0, 0.5, 1.0], vec![0.0, 0.0, 2.0]],
            StateVec::new(vec![0.1, 0.2, 0.3]).unwrap(),
        )
        .unwrap();
        assert!(mollify(&lin, &p, &h).unwrap().distance(&lin.eval(&h)) < 1e-6);
    }

    #[test]
    fn dimension_limits() {
        assert!(matches!(
            MollifierParams::new(4, 1.0),
            Err(Error::UnsupportedDimension { dim: 4, max: 3 })
        ));
        let p = MollifierParams::new(3, 1.0).unwrap();
        let f = Constant(StateVec::zeros(2));
        assert!(mollify(&f, &p, &StateVec::zeros(2)).is_err());
    }

    #[test]
    fn support_radius_respected() {
        // f vanishes within distance 1/a of h, so the mollified value is 0
        let a = 4.0;
        let p = MollifierParams::new(2, a).unwrap();
        let f = FnMap(|g: &StateVec| StateVec::filled(2, if g.norm() > 0.25 + 1e-12 { 1.0 } else { 0.0 }));
        assert_eq!(mollify(&f, &p, &StateVec::zeros(2)).unwrap(), StateVec::zeros(2));
        assert_eq!(p.support_radius(), 0.25);
    }

    #[test]
    fn monte_carlo_agrees_with_tensor_rule() {
        let f = FnMap(|g: &StateVec| StateVec::new(vec![g[0].sin(), (g[1] * g[0]).cos()]).unwrap());
        let h = StateVec::new(vec![0.4, -0.7]).unwrap();
        let p = MollifierParams::new(2, 2.0).unwrap();
        let exact = mollify(&f, &p, &h).unwrap();
        let (mc, se) = mollify_monte_carlo(&f, 2, 2.0, &h, 20_000, 9).unwrap();
        for k in 0..2 {
            assert!((mc[k] - exact[k]).abs() < 4.0 * se[k] + 1e-12, "k={k}");
        }
        let m = Mollified::new(Arc::new(f), p, 2).unwrap();
        assert_eq!(m.eval(&h), exact);
    }
}

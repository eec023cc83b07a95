//! Coefficient sets `(alpha, sigma, gamma, F)` and the pointwise checkers of
//! the invariance conditions at sampled points of the cone.
//!
//! The three conditions are checked independently:
//!
//! * jump: `h + gamma_i(h)` stays in `K` for every atom and every sampled `h`;
//! * drift: `a(h^*, h) + <h^*, alpha(h)> - sum_i w_i <h^*, gamma_i(h)> >= 0`
//!   on sampled boundary pairs;
//! * volatility: `<h^*, sigma^j(h)> = 0` on sampled boundary pairs.
//!
//! Sampling can only exhibit violations; a clean run is reported as
//! [`Verdict::NoViolationFound`], never as a proof of invariance.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::maps::{SharedMap, Zero};
use crate::semigroup::{DiagonalSemigroup, LiminfGrid};
use crate::space::{ConeSpec, Functional, StateVec};

/// Default tolerance for built-in analytic families.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default tolerance when any coefficient is a user table.
pub const TABLE_TOL: f64 = 1e-6;

/// Witnesses kept per condition in a report.
const MAX_WITNESSES: usize = 64;

/// One atom `x_i` of the finite mark measure: `F({x_i}) = weight`, with
/// jump kernel `gamma(., x_i)`.
#[derive(Debug, Clone)]
pub struct JumpAtom {
    pub weight: f64,
    pub kernel: SharedMap,
}

/// Drift, volatility columns and jump atoms of a Galerkin SPDE on `E_N`.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    dim: usize,
    pub drift: SharedMap,
    pub vol: Vec<SharedMap>,
    pub jumps: Vec<JumpAtom>,
    pub lipschitz_hint: Option<f64>,
}

impl CoefficientSet {
    pub fn new(dim: usize, drift: SharedMap, vol: Vec<SharedMap>, jumps: Vec<JumpAtom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("coefficient dimension must be >= 1".into()));
        }
        for (i, atom) in jumps.iter().enumerate() {
            if !(atom.weight >= 0.0) || !atom.weight.is_finite() {
                return Err(Error::Config(format!(
                    "jump atom {i} has weight {}, expected finite and >= 0",
                    atom.weight
                )));
            }
        }
        Ok(Self {
            dim,
            drift,
            vol,
            jumps,
            lipschitz_hint: None,
        })
    }

    /// All coefficients zero, with `columns` zero volatility columns.
    pub fn zero(dim: usize, columns: usize) -> Self {
        let z: SharedMap = std::sync::Arc::new(Zero);
        Self {
            dim,
            drift: z.clone(),
            vol: vec![z; columns],
            jumps: Vec::new(),
            lipschitz_hint: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn columns(&self) -> usize {
        self.vol.len()
    }

    /// Compensator drift `sum_i w_i gamma_i(h)`.
    pub fn compensator(&self, h: &StateVec) -> StateVec {
        let mut out = StateVec::zeros(h.dim());
        for atom in &self.jumps {
            out.axpy(atom.weight, &atom.kernel.eval(h));
        }
        out
    }

    /// Hilbert-Schmidt norm `sqrt(sum_j |sigma^j(h)|^2)`.
    pub fn vol_hs_norm(&self, h: &StateVec) -> f64 {
        self.vol.iter().map(|s| s.eval(h).norm_sq()).fold(0.0, |a, x| a + x).sqrt()
    }

    /// `sigma(h) u = sum_j u_j sigma^j(h)`.
    pub fn vol_apply(&self, h: &StateVec, u: &[f64]) -> Result<StateVec> {
        check_dim(self.columns(), u.len())?;
        let mut out = StateVec::zeros(h.dim());
        for (col, &uj) in self.vol.iter().zip(u) {
            out.axpy(uj, &col.eval(h));
        }
        Ok(out)
    }

    /// Evaluates every map at `h` and checks dimensions and finiteness.
    pub fn validate_at(&self, h: &StateVec) -> Result<()> {
        check_dim(self.dim, h.dim())?;
        let maps = std::iter::once(&self.drift)
            .chain(&self.vol)
            .chain(self.jumps.iter().map(|a| &a.kernel));
        for m in maps {
            let out = m.eval(h);
            check_dim(self.dim, out.dim())?;
            if !out.is_finite() {
                return Err(Error::Numeric(format!("coefficient {m:?} is not finite at {h:?}")));
            }
        }
        Ok(())
    }
}

/// How points of `K` are drawn for the checkers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSpec {
    /// Random points per constrained face.
    pub per_face: usize,
    /// Random interior points (used by the jump condition only).
    pub interior: usize,
    pub seed: u64,
    /// Include the apex and the signed unit vectors on each face.
    pub corners: bool,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            per_face: 64,
            interior: 64,
            seed: 0,
            corners: true,
        }
    }
}

/// Sampled points of `K`: interior points and boundary pairs.
#[derive(Debug, Clone)]
pub struct Samples {
    pub interior: Vec<StateVec>,
    pub faces: Vec<(Functional, StateVec)>,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.interior.len() + self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every sampled point, interior first.
    pub fn points(&self) -> impl Iterator<Item = &StateVec> {
        self.interior.iter().chain(self.faces.iter().map(|(_, h)| h))
    }
}

fn folded(rng: &mut ChaCha8Rng, sign: i8) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    match sign {
        0 => z,
        s => f64::from(s) * z.abs(),
    }
}

/// Draws checker points. Faces are visited in coordinate order and every
/// face gets its own stream derived from the seed, so adding faces does not
/// perturb the points of existing ones.
pub fn sample_points(cone: &ConeSpec, spec: &SamplerSpec) -> Samples {
    let dim = cone.dim();
    let signs = cone.signs();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut interior = Vec::with_capacity(spec.interior + 1);
    if spec.corners {
        interior.push(StateVec::zeros(dim));
    }
    for _ in 0..spec.interior {
        let coords = signs.iter().map(|&s| folded(&mut rng, s)).collect();
        interior.push(StateVec::from_vec_unchecked(coords));
    }

    let mut faces = Vec::new();
    for f in cone.generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(1 + f.index as u64);
        if spec.corners {
            faces.push((f, StateVec::zeros(dim)));
            for j in (0..dim).filter(|&j| j != f.index) {
                let mut e = StateVec::zeros(dim);
                e.coords_mut()[j] = if signs[j] == 0 { 1.0 } else { f64::from(signs[j]) };
                faces.push((f, e));
            }
        }
        for _ in 0..spec.per_face {
            let coords = signs
                .iter()
                .enumerate()
                .map(|(j, &s)| if j == f.index { 0.0 } else { folded(&mut rng, s) })
                .collect();
            faces.push((f, StateVec::from_vec_unchecked(coords)));
        }
    }
    Samples { interior, faces }
}

/// The invariance conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Jumps map `K` into `K`.
    Jump,
    /// Drift is inward pointing at boundary pairs.
    Drift,
    /// Volatility columns are parallel at boundary pairs.
    Volatility,
}

/// A sampled point at which a condition fails by more than the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub condition: Condition,
    pub point: StateVec,
    /// The violated functional; for jumps, the most violated face of
    /// `h + gamma_i(h)`.
    pub functional: Option<Functional>,
    /// Jump atom or volatility column index.
    pub component: Option<usize>,
    pub magnitude: f64,
}

fn witness_order(a: &Witness, b: &Witness) -> Ordering {
    a.condition
        .cmp(&b.condition)
        .then(b.magnitude.total_cmp(&a.magnitude))
        .then(a.functional.cmp(&b.functional))
        .then(a.component.cmp(&b.component))
        .then_with(|| {
            a.point
                .coords()
                .iter()
                .zip(b.point.coords())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

/// Result of one condition checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub condition: Condition,
    pub ok: bool,
    pub evaluated: usize,
    pub violations: usize,
    /// Smallest margin seen (negative means violated).
    pub min_margin: f64,
    pub witnesses: Vec<Witness>,
}

impl CheckOutcome {
    fn assemble(condition: Condition, evaluated: usize, tol: f64, results: Vec<(f64, Option<Witness>)>) -> Self {
        let min_margin = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let mut witnesses: Vec<Witness> = results.into_iter().filter_map(|r| r.1).collect();
        witnesses.retain(|w| w.magnitude > tol);
        let violations = witnesses.len();
        witnesses.sort_by(witness_order);
        witnesses.truncate(MAX_WITNESSES);
        Self {
            condition,
            ok: violations == 0,
            evaluated,
            violations,
            min_margin,
            witnesses,
        }
    }
}

/// Minimum margins of the three equivalent forms of the drift condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftVariants {
    /// `a + <h^*, alpha> - compensator pairing`.
    pub liminf_form: f64,
    /// `<h^*, alpha> - compensator pairing`, valid when `a = 0`.
    pub simplified_form: f64,
    /// `<h^*, A h + alpha> - compensator pairing`.
    pub generator_form: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoViolationFound,
    Violated,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::NoViolationFound => "NO VIOLATION FOUND (sampled)",
            Verdict::Violated => "VIOLATED (witness found)",
        })
    }
}

/// Combined checker report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub verdict: Verdict,
    pub jump_ok: bool,
    pub drift_ok: bool,
    pub vol_ok: bool,
    pub tol: f64,
    pub sampled_points: usize,
    pub drift_variants: DriftVariants,
    pub outcomes: Vec<CheckOutcome>,
}

impl ConditionReport {
    /// Witnesses of every condition, in canonical order.
    pub fn witnesses(&self) -> impl Iterator<Item = &Witness> {
        self.outcomes.iter().flat_map(|o| o.witnesses.iter())
    }

    pub fn is_satisfied(&self) -> bool {
        self.verdict == Verdict::NoViolationFound
    }
}

fn ensure_in_cone(cone: &ConeSpec, h: &StateVec) -> Result<()> {
    if cone.contains(h, 0.0)? {
        Ok(())
    } else {
        Err(Error::Internal(format!("sampler produced a point outside K: {h:?}")))
    }
}

/// Checks the jump condition at every sampled point and atom.
pub fn check_jump_condition(
    coeffs: &CoefficientSet,
    cone: &ConeSpec,
    samples: &Samples,
    tol: f64,
) -> Result<CheckOutcome> {
    check_dim(coeffs.dim(), cone.dim())?;
    let points: Vec<&StateVec> = samples.points().collect();
    let results = points
        .par_iter()
        .map(|h| -> Result<Vec<(f64, Option<Witness>)>> {
            ensure_in_cone(cone, h)?;
            Ok(coeffs
                .jumps
                .iter()
                .enumerate()
                .map(|(i, atom)| {
                    let after = h.add(&atom.kernel.eval(h));
                    let worst = cone
                        .generators()
                        .map(|f| (f.pair(&after), f))
                        .min_by(|a, b| a.0.total_cmp(&b.0));
                    match worst {
                        Some((m, f)) => {
                            let w = (m < -tol).then(|| Witness {
                                condition: Condition::Jump,
                                point: (*h).clone(),
                                functional: Some(f),
                                component: Some(i),
                                magnitude: -m,
                            });
                            (m, w)
                        }
                        None => (f64::INFINITY, None),
                    }
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let evaluated = points.len() * coeffs.jumps.len();
    Ok(CheckOutcome::assemble(
        Condition::Jump,
        evaluated,
        tol,
        results.into_iter().flatten().collect(),
    ))
}

/// Semigroup drift `a(h^*, h)` of a sampled face pair, which must lie in the
/// boundary set.
fn boundary_drift(
    semigroup: &DiagonalSemigroup,
    cone: &ConeSpec,
    f: Functional,
    h: &StateVec,
) -> Result<f64> {
    ensure_in_cone(cone, h)?;
    let bp = semigroup.boundary_membership(cone, f, h, &LiminfGrid::default())?;
    bp.a_value
        .ok_or_else(|| Error::Internal(format!("sampled pair ({f:?}, {h:?}) is not a boundary pair")))
}

fn drift_terms(
    coeffs: &CoefficientSet,
    semigroup: &DiagonalSemigroup,
    cone: &ConeSpec,
    f: Functional,
    h: &StateVec,
) -> Result<(f64, f64, f64)> {
    let a = boundary_drift(semigroup, cone, f, h)?;
    let drift = f.pair(&coeffs.drift.eval(h));
    let comp = f.pair(&coeffs.compensator(h));
    let gen = f.pair(&semigroup.generator(h)?);
    Ok((a + drift - comp, drift - comp, gen + drift - comp))
}

/// Checks the inward-pointing drift condition, reporting all three forms.
pub fn check_drift_condition(
    coeffs: &CoefficientSet,
    semigroup: &DiagonalSemigroup,
    cone: &ConeSpec,
    samples: &Samples,
    tol: f64,
) -> Result<(CheckOutcome, DriftVariants)> {
    check_dim(coeffs.dim(), cone.dim())?;
    let per_pair = samples
        .faces
        .par_iter()
        .map(|(f, h)| drift_terms(coeffs, semigroup, cone, *f, h).map(|t| (*f, h, t)))
        .collect::<Result<Vec<_>>>()?;
    let mut variants = DriftVariants {
        liminf_form: f64::INFINITY,
        simplified_form: f64::INFINITY,
        generator_form: f64::INFINITY,
    };
    let results = per_pair
        .into_iter()
        .map(|(f, h, (main, simplified, generator))| {
            variants.liminf_form = variants.liminf_form.min(main);
            variants.simplified_form = variants.simplified_form.min(simplified);
            variants.generator_form = variants.generator_form.min(generator);
            let w = (main < -tol).then(|| Witness {
                condition: Condition::Drift,
                point: h.clone(),
                functional: Some(f),
                component: None,
                magnitude: -main,
            });
            (main, w)
        })
        .collect();
    Ok((
        CheckOutcome::assemble(Condition::Drift, samples.faces.len(), tol, results),
        variants,
    ))
}

/// Checks that every volatility column is parallel at sampled boundary pairs.
pub fn check_volatility_condition(
    coeffs: &CoefficientSet,
    semigroup: &DiagonalSemigroup,
    cone: &ConeSpec,
    samples: &Samples,
    tol: f64,
) -> Result<CheckOutcome> {
    check_dim(coeffs.dim(), cone.dim())?;
    let results = samples
        .faces
        .par_iter()
        .map(|(f, h)| -> Result<Vec<(f64, Option<Witness>)>> {
            boundary_drift(semigroup, cone, *f, h)?;
            Ok(coeffs
                .vol
                .iter()
                .enumerate()
                .map(|(j, col)| {
                    let pairing = f.pair(&col.eval(h)).abs();
                    let w = (pairing > tol).then(|| Witness {
                        condition: Condition::Volatility,
                        point: h.clone(),
                        functional: Some(*f),
                        component: Some(j),
                        magnitude: pairing,
                    });
                    (0.0 - pairing, w)
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckOutcome::assemble(
        Condition::Volatility,
        samples.faces.len() * coeffs.columns(),
        tol,
        results.into_iter().flatten().collect(),
    ))
}

/// Runs all three checkers on one sample set.
pub fn invariance_verdict(
    coeffs: &CoefficientSet,
    semigroup: &DiagonalSemigroup,
    cone: &ConeSpec,
    samples: &Samples,
    tol: f64,
) -> Result<ConditionReport> {
    check_dim(semigroup.dim(), cone.dim())?;
    if !semigroup.preserves_cone(cone)? {
        return Err(Error::Config("semigroup does not leave the cone invariant".into()));
    }
    let jump = check_jump_condition(coeffs, cone, samples, tol)?;
    let (drift, drift_variants) = check_drift_condition(coeffs, semigroup, cone, samples, tol)?;
    let vol = check_volatility_condition(coeffs, semigroup, cone, samples, tol)?;
    let all_ok = jump.ok && drift.ok && vol.ok;
    Ok(ConditionReport {
        verdict: if all_ok {
            Verdict::NoViolationFound
        } else {
            Verdict::Violated
        },
        jump_ok: jump.ok,
        drift_ok: drift.ok,
        vol_ok: vol.ok,
        tol,
        sampled_points: samples.len(),
        drift_variants,
        outcomes: vec![jump, drift, vol],
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::maps::{Constant, Diagonal, FnMap, MeanReversion};

    fn v(x: &[f64]) -> StateVec {
        StateVec::new(x.to_vec()).unwrap()
    }

    fn setup(dim: usize) -> (DiagonalSemigroup, ConeSpec, Samples) {
        let cone = ConeSpec::nonnegative(dim);
        let samples = sample_points(
            &cone,
            &SamplerSpec {
                per_face: 16,
                interior: 16,
                ..Default::default()
            },
        );
        (DiagonalSemigroup::heat(dim).unwrap(), cone, samples)
    }

    #[test]
    fn sampler_respects_cone_and_faces() {
        let cone = ConeSpec::new(vec![1, -1, 0]).unwrap();
        let s = sample_points(&cone, &SamplerSpec::default());
        for h in s.points() {
            assert!(cone.contains(h, 0.0).unwrap());
        }
        for (f, h) in &s.faces {
            assert_eq!(f.pair(h), 0.0);
        }
        // two constrained faces, each with corners (1 + 2) and 64 random
        assert_eq!(s.faces.len(), 2 * (3 + 64));
        assert_eq!(s.interior.len(), 65);
    }

    #[test]
    fn jump_condition_examples() {
        let (_, cone, samples) = setup(3);
        let zero = CoefficientSet::zero(3, 0);
        let mut c = zero.clone();
        c.jumps.push(JumpAtom {
            weight: 1.0,
            kernel: Arc::new(crate::maps::Zero),
        });
        assert!(check_jump_condition(&c, &cone, &samples, DEFAULT_TOL).unwrap().ok);

        c.jumps[0].kernel = Arc::new(Constant(v(&[1.0, 1.0, 1.0])));
        assert!(check_jump_condition(&c, &cone, &samples, DEFAULT_TOL).unwrap().ok);

        c.jumps[0].kernel = Arc::new(Diagonal::new(vec![-2.0; 3]));
        let single = Samples {
            interior: vec![v(&[1.0, 0.0, 0.0])],
            faces: vec![],
        };
        let out = check_jump_condition(&c, &cone, &single, DEFAULT_TOL).unwrap();
        assert!(!out.ok);
        let w = &out.witnesses[0];
        assert_eq!(w.functional, Some(Functional { sign: 1, index: 0 }));
        assert_eq!(w.magnitude, 1.0);
    }

    #[test]
    fn drift_condition_examples() {
        let (s, cone, samples) = setup(3);
        let mut c = CoefficientSet::zero(3, 0);
        c.drift = Arc::new(Constant(v(&[0.0, 0.5, 2.0])));
        let (out, _) = check_drift_condition(&c, &s, &cone, &samples, DEFAULT_TOL).unwrap();
        assert!(out.ok);

        // jump pushes inward but its compensator makes the drift point outward
        let mut c = CoefficientSet::zero(3, 0);
        c.jumps.push(JumpAtom {
            weight: 1.0,
            kernel: Arc::new(Constant(v(&[1.0, 0.0, 0.0]))),
        });
        assert!(check_jump_condition(&c, &cone, &samples, DEFAULT_TOL).unwrap().ok);
        let (out, variants) = check_drift_condition(&c, &s, &cone, &samples, DEFAULT_TOL).unwrap();
        assert!(!out.ok);
        assert_eq!(out.witnesses[0].functional.unwrap().index, 0);
        assert_eq!(out.witnesses[0].magnitude, 1.0);
        assert_eq!(variants.liminf_form, -1.0);
        assert_eq!(variants.simplified_form, -1.0);
        assert_eq!(variants.generator_form, -1.0);

        let mut c = CoefficientSet::zero(3, 0);
        c.drift = Arc::new(MeanReversion {
            kappa: 1.5,
            target: v(&[0.2, 0.0, 1.0]),
        });
        let (out, variants) = check_drift_condition(&c, &s, &cone, &samples, DEFAULT_TOL).unwrap();
        assert!(out.ok);
        assert_eq!(variants.liminf_form, 0.0);
    }

    #[test]
    fn volatility_condition_examples() {
        let (s, cone, samples) = setup(3);
        let mut c = CoefficientSet::zero(3, 0);
        c.vol = (0..3)
            .map(|j| Arc::new(Diagonal::single(3, j, 0.7).unwrap()) as SharedMap)
            .collect();
        assert!(check_volatility_condition(&c, &s, &cone, &samples, DEFAULT_TOL).unwrap().ok);

        c.vol.push(Arc::new(Constant(v(&[0.4, 0.0, 0.0]))));
        let out = check_volatility_condition(&c, &s, &cone, &samples, DEFAULT_TOL).unwrap();
        assert!(!out.ok);
        let w = &out.witnesses[0];
        assert_eq!(w.functional, Some(Functional { sign: 1, index: 0 }));
        assert_eq!(w.component, Some(3));
        assert_eq!(w.magnitude, 0.4);
    }

    #[test]
    fn free_coordinates_are_not_tested() {
        let cone = ConeSpec::new(vec![1, 0]).unwrap();
        let s = DiagonalSemigroup::heat(2).unwrap();
        let samples = sample_points(&cone, &SamplerSpec::default());
        let mut c = CoefficientSet::zero(2, 0);
        c.vol.push(Arc::new(Constant(v(&[0.0, 3.0]))));
        assert!(check_volatility_condition(&c, &s, &cone, &samples, DEFAULT_TOL).unwrap().ok);
    }

    #[test]
    fn sampler_contract_is_enforced() {
        let (s, cone, _) = setup(2);
        let bad = Samples {
            interior: vec![],
            faces: vec![(Functional { sign: 1, index: 0 }, v(&[0.5, 1.0]))],
        };
        let c = CoefficientSet::zero(2, 1);
        assert!(matches!(
            check_volatility_condition(&c, &s, &cone, &bad, DEFAULT_TOL),
            Err(Error::Internal(_))
        ));
        let outside = Samples {
            interior: vec![v(&[-1.0, 1.0])],
            faces: vec![],
        };
        let mut c = CoefficientSet::zero(2, 0);
        c.jumps.push(JumpAtom {
            weight: 1.0,
            kernel: Arc::new(crate::maps::Zero),
        });
        assert!(matches!(
            check_jump_condition(&c, &cone, &outside, DEFAULT_TOL),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn zero_coefficients_satisfy() {
        let (s, cone, samples) = setup(4);
        let r = invariance_verdict(&CoefficientSet::zero(4, 2), &s, &cone, &samples, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::NoViolationFound);
    }

    #[test]
    fn checker_is_deterministic() {
        let cone = ConeSpec::nonnegative(3);
        let s = DiagonalSemigroup::heat(3).unwrap();
        let mut c = CoefficientSet::zero(3, 0);
        c.drift = Arc::new(FnMap(|h: &StateVec| h.scaled(-1.0).add(&StateVec::filled(3, -0.01))));
        let spec = SamplerSpec {
            seed: 42,
            ..Default::default()
        };
        let a = invariance_verdict(&c, &s, &cone, &sample_points(&cone, &spec), DEFAULT_TOL).unwrap();
        let b = invariance_verdict(&c, &s, &cone, &sample_points(&cone, &spec), DEFAULT_TOL).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.verdict, Verdict::Violated);
    }

    #[test]
    fn negative_weight_rejected() {
        let z: SharedMap = Arc::new(crate::maps::Zero);
        assert!(CoefficientSet::new(
            2,
            z.clone(),
            vec![],
            vec![JumpAtom {
                weight: -1.0,
                kernel: z
            }]
        )
        .is_err());
    }
}

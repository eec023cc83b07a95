//! Invariant suites for the approximation operators, run on demand by the
//! `appendix` command and by the acceptance tests.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{
    compose_shift, inf_convolve, mollify, stratonovich_correction, stratonovich_correction_analytic, sup_inf_convolve,
    BoundaryShift, MollifierParams, PhiEps, SearchSpec, SupInfParams, DEFAULT_FD_STEP,
};
use crate::coefficients::{sample_points, CoefficientSet, SamplerSpec};
use crate::error::{Error, Result};
use crate::maps::{Affine, Constant, FnMap, SharedMap, VectorMap};
use crate::space::{retract, ConeSpec, StateVec};

/// Sample counts and operator parameters of the suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppendixSettings {
    /// Grid points on `[-10, 10]` per `eps`.
    pub grid_points: usize,
    pub phi_eps: Vec<f64>,
    /// Random pairs for the retraction suite.
    pub pairs: usize,
    pub pair_dim: usize,
    pub retraction_radius: f64,
    pub envelope_lambda: f64,
    pub supinf_lambda: f64,
    pub supinf_mu: f64,
    /// Spacing of the derivative grid on `[-1.5, 1.5]`.
    pub supinf_spacing: f64,
    pub mollifier_a: f64,
    pub face_points: usize,
    pub seed: u64,
}

impl Default for AppendixSettings {
    fn default() -> Self {
        Self {
            grid_points: 10_000,
            phi_eps: vec![1e-3, 1e-1, 1.0],
            pairs: 10_000,
            pair_dim: 32,
            retraction_radius: 4.0,
            envelope_lambda: 0.5,
            supinf_lambda: 1e-2,
            supinf_mu: 1e-3,
            supinf_spacing: 1e-3,
            mollifier_a: 8.0,
            face_points: 64,
            seed: 0,
        }
    }
}

impl AppendixSettings {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 || self.pairs == 0 || self.pair_dim == 0 || self.face_points == 0 {
            return Err(Error::Config("sample counts must be positive (grid_points >= 2)".into()));
        }
        if self.phi_eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("phi_eps entries must be > 0".into()));
        }
        if !(self.retraction_radius > 0.0 && self.envelope_lambda > 0.0 && self.supinf_spacing > 0.0 && self.mollifier_a > 0.0) {
            return Err(Error::Config("radii, lambdas, spacings and bandwidths must be > 0".into()));
        }
        SupInfParams::new(self.supinf_lambda, self.supinf_mu)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Phi,
    Retraction,
    Supinf,
    Mollify,
    Rho,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["phi", "retraction", "supinf", "mollify", "rho", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "phi" => Suite::Phi,
            "retraction" => Suite::Retraction,
            "supinf" => Suite::Supinf,
            "mollify" => Suite::Mollify,
            "rho" => Suite::Rho,
            "all" => Suite::All,
            other => {
                return Err(Error::Config(format!(
                    "unknown suite {other:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Suite::NAMES[i])
    }
}

/// Outcome of one property: `worst` is the largest observed statistic and
/// must not exceed `bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub suite: Suite,
    pub property: String,
    pub checked: usize,
    pub failures: usize,
    pub worst: f64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    pub results: Vec<PropertyResult>,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(PropertyResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.passed())
    }

    /// Plain-text summary table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<11} {:<46} {:>8} {:>6} {:>12} {:>12}\n",
            "suite", "property", "checked", "fail", "worst", "bound"
        );
        for r in &self.results {
            out.push_str(&format!(
                "{:<11} {:<46} {:>8} {:>6} {:>12.4e} {:>12.4e}\n",
                r.suite.to_string(),
                r.property,
                r.checked,
                r.failures,
                r.worst,
                r.bound
            ));
        }
        out
    }
}

/// Accumulates per-sample checks of one property.
struct Tally {
    suite: Suite,
    property: String,
    bound: f64,
    checked: usize,
    failures: usize,
    worst: f64,
    counterexample: Option<String>,
}

impl Tally {
    fn new(suite: Suite, property: impl Into<String>, bound: f64) -> Self {
        Self {
            suite,
            property: property.into(),
            bound,
            checked: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
            counterexample: None,
        }
    }

    fn record(&mut self, value: f64, at: impl FnOnce() -> String) {
        self.checked += 1;
        if value > self.worst || value.is_nan() {
            self.worst = value;
        }
        if !(value <= self.bound) {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(format!("{} (value {value:e})", at()));
            }
        }
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            suite: self.suite,
            property: self.property,
            checked: self.checked,
            failures: self.failures,
            worst: if self.checked == 0 { 0.0 } else { self.worst },
            bound: self.bound,
            counterexample: self.counterexample,
        }
    }
}

fn phi_suite(s: &AppendixSettings) -> Result<Vec<PropertyResult>> {
    let mut out = Vec::new();
    let n = s.grid_points;
    let xs: Vec<f64> = (0..n).map(|i| -10.0 + 20.0 * i as f64 / (n - 1) as f64).collect();
    for &eps in &s.phi_eps {
        let p = PhiEps::new(eps)?;
        let mut dead = Tally::new(Suite::Phi, format!("dead zone, eps={eps:e}"), 0.0);
        let mut close = Tally::new(Suite::Phi, format!("|phi(x) - x| <= eps, eps={eps:e}"), eps * (1.0 + 1e-12));
        let mut lip = Tally::new(Suite::Phi, format!("1-Lipschitz on grid, eps={eps:e}"), 1.0 + 1e-9);
        // the main grid can miss a narrow dead zone, so it gets its own
        let inner = (n / 10).max(2);
        for i in 0..inner {
            let x = eps * (-1.0 + 2.0 * i as f64 / (inner - 1) as f64);
            dead.record(p.apply(x).abs(), || format!("x={x}"));
        }
        for (i, &x) in xs.iter().enumerate() {
            if x.abs() <= eps {
                dead.record(p.apply(x).abs(), || format!("x={x}"));
            }
            close.record((p.apply(x) - x).abs(), || format!("x={x}"));
            if i > 0 {
                let y = xs[i - 1];
                lip.record((p.apply(x) - p.apply(y)).abs() / (x - y), || format!("x={y}, y={x}"));
            }
        }
        out.extend([dead.finish(), close.finish(), lip.finish()]);
    }

    // the boundary shift on the whole space
    let dim = 8;
    let shift = BoundaryShift::dyadic(3, dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut lip = Tally::new(Suite::Phi, "boundary shift Lipschitz <= 2", BoundaryShift::LIPSCHITZ * (1.0 + 1e-12));
    for _ in 0..s.pairs {
        let h = gaussian(&mut rng, dim, 0.3);
        let g = gaussian(&mut rng, dim, 0.3);
        let d = h.distance(&g);
        if d > 0.0 {
            lip.record(shift.eval(&h).distance(&shift.eval(&g)) / d, || format!("h={:?}, g={:?}", h.coords(), g.coords()));
        }
    }
    out.push(lip.finish());
    Ok(out)
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> StateVec {
    StateVec::from_vec_unchecked((0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect())
}

fn retraction_suite(s: &AppendixSettings) -> Result<Vec<PropertyResult>> {
    let r = s.retraction_radius;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut lip = Tally::new(Suite::Retraction, "|R(h) - R(g)| / |h - g| <= 1", 1.0 + 1e-12);
    let mut bounded = Tally::new(Suite::Retraction, "|R(h)| <= radius", r * (1.0 + 1e-12));
    // spread norms across both sides of the ball
    let spread = 2.0 * r / (s.pair_dim as f64).sqrt();
    for _ in 0..s.pairs {
        let a = spread * rng.random::<f64>();
        let b = spread * rng.random::<f64>();
        let h = gaussian(&mut rng, s.pair_dim, a);
        let g = gaussian(&mut rng, s.pair_dim, b);
        let (rh, rg) = (retract(&h, r)?, retract(&g, r)?);
        let d = h.distance(&g);
        if d > 0.0 {
            lip.record(rh.distance(&rg) / d, || format!("|h|={}, |g|={}", h.norm(), g.norm()));
        }
        bounded.record(rh.norm(), || format!("|h|={}", h.norm()));
    }
    Ok(vec![lip.finish(), bounded.finish()])
}

fn capped_abs(g: &StateVec) -> f64 {
    g[0].abs().min(1.0)
}

/// Moreau envelope of `min(|x|, 1)`: `min(huber_lambda(x), 1)`.
fn capped_abs_envelope(x: f64, lambda: f64) -> f64 {
    let huber = if x.abs() <= lambda {
        x * x / (2.0 * lambda)
    } else {
        x.abs() - lambda / 2.0
    };
    huber.min(1.0)
}

fn supinf_suite(s: &AppendixSettings) -> Result<Vec<PropertyResult>> {
    let x = |v: f64| StateVec::from_vec_unchecked(vec![v]);
    let search = SearchSpec::for_function(1.0, 1.0);

    let lambda = s.envelope_lambda;
    let mut env = Tally::new(Suite::Supinf, format!("Moreau envelope closed form, lambda={lambda:e}"), 1e-6);
    for i in 0..=400 {
        let v = -2.0 + 0.01 * i as f64;
        let got = inf_convolve(&capped_abs, lambda, &x(v), &search)?;
        env.record((got - capped_abs_envelope(v, lambda)).abs(), || format!("x={v}"));
    }

    let p = SupInfParams::new(s.supinf_lambda, s.supinf_mu)?;
    let f_lm = |v: f64| sup_inf_convolve(&capped_abs, p, &x(v), &search);
    let h = s.supinf_spacing;
    let delta = h / 100.0;
    let steps = (3.0 / h).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| -1.5 + i as f64 * h).collect();
    let mut sup_err = Tally::new(
        Suite::Supinf,
        format!("sup |(f_l)^m - f|, l={:e} m={:e}", p.lambda(), p.mu()),
        0.05,
    );
    let evals = grid
        .par_iter()
        .map(|&v| Ok((f_lm(v)?, (f_lm(v + delta)? - f_lm(v - delta)?) / (2.0 * delta))))
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let mut derivs = Vec::with_capacity(grid.len());
    for (&v, &(fv, d)) in grid.iter().zip(&evals) {
        sup_err.record((fv - capped_abs(&x(v))).abs(), || format!("x={v}"));
        derivs.push(d);
    }
    let bound = 1.05 * p.gradient_lipschitz();
    let mut lip = Tally::new(Suite::Supinf, "FD derivative Lipschitz <= 1.05 / mu", bound);
    for i in 1..grid.len() {
        lip.record((derivs[i] - derivs[i - 1]).abs() / h, || format!("x in [{}, {}]", grid[i - 1], grid[i]));
    }
    Ok(vec![env.finish(), sup_err.finish(), lip.finish()])
}

fn mollify_suite(s: &AppendixSettings) -> Result<Vec<PropertyResult>> {
    let dim = 3;
    let p = MollifierParams::new(2, s.mollifier_a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let c = Constant(StateVec::from_vec_unchecked(vec![1.5, -2.0, 0.25]));
    let lin = Affine::new(
        vec![vec![1.0, 2.0, 0.0], vec![-3.0, 0.5, 1.0], vec![0.0, 0.0, 2.0]],
        StateVec::from_vec_unchecked(vec![0.1, 0.2, 0.3]),
    )?;
    let mut constant = Tally::new(Suite::Mollify, "constant map reproduced", 1e-10);
    let mut linear = Tally::new(Suite::Mollify, "linear map reproduced", 1e-6);
    for _ in 0..s.face_points {
        let h = gaussian(&mut rng, dim, 2.0);
        constant.record(mollify(&c, &p, &h)?.distance(&c.0), || format!("h={:?}", h.coords()));
        linear.record(mollify(&lin, &p, &h)?.distance(&lin.eval(&h)), || format!("h={:?}", h.coords()));
    }

    // a parallel column made locally parallel by the boundary shift, whose
    // dead zone covers the kernel support
    let cone = ConeSpec::nonnegative(2);
    let sigma: SharedMap = Arc::new(FnMap(|h: &StateVec| {
        StateVec::from_vec_unchecked(vec![0.3 * h[0].abs().sqrt(), h[1].abs().min(1.0)])
    }));
    let eps = 2.0 * BoundaryShift::LIPSCHITZ / s.mollifier_a;
    let shifted = compose_shift(sigma, BoundaryShift::new(2, eps, 2)?);
    let sampler = SamplerSpec {
        per_face: s.face_points.div_ceil(2),
        interior: 0,
        seed: s.seed,
        corners: false,
    };
    let samples = sample_points(&cone, &sampler);
    let mut par = Tally::new(Suite::Mollify, "locally parallel column stays parallel", 1e-12);
    for (f, h) in samples.faces.iter().take(s.face_points) {
        let v = mollify(shifted.as_ref(), &p, h)?;
        par.record(f.pair(&v).abs(), || format!("face {}, h={:?}", f.index, h.coords()));
    }
    Ok(vec![constant.finish(), linear.finish(), par.finish()])
}

fn rho_suite(s: &AppendixSettings, c: &CoefficientSet, cone: &ConeSpec) -> Result<Vec<PropertyResult>> {
    let sampler = SamplerSpec {
        per_face: s.face_points.div_ceil(cone.dim().max(1)).max(4),
        interior: s.face_points,
        seed: s.seed,
        corners: true,
    };
    let samples = sample_points(cone, &sampler);
    let mut agree = Tally::new(Suite::Rho, "analytic vs finite-difference rho", 1e-6);
    for h in samples.points() {
        let fd = stratonovich_correction(c, h, DEFAULT_FD_STEP)?;
        match stratonovich_correction_analytic(c, h) {
            Some(an) => agree.record(an.distance(&fd), || format!("h={:?}", h.coords())),
            None => break,
        }
    }
    let mut par = Tally::new(Suite::Rho, "max face pairing |<h*, rho(h)>|", 1e-6);
    for (f, h) in &samples.faces {
        let rho = stratonovich_correction(c, h, DEFAULT_FD_STEP)?;
        par.record(f.pair(&rho).abs(), || format!("face {}, h={:?}", f.index, h.coords()));
    }
    Ok(vec![agree.finish(), par.finish()])
}

/// Runs `suite`. The rho suite uses `coefficients` on `cone`.
pub fn run_suite(
    suite: Suite,
    settings: &AppendixSettings,
    coefficients: &CoefficientSet,
    cone: &ConeSpec,
) -> Result<AppendixReport> {
    settings.validate()?;
    let mut results = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Phi {
        results.extend(phi_suite(settings)?);
    }
    if all || suite == Suite::Retraction {
        results.extend(retraction_suite(settings)?);
    }
    if all || suite == Suite::Supinf {
        results.extend(supinf_suite(settings)?);
    }
    if all || suite == Suite::Mollify {
        results.extend(mollify_suite(settings)?);
    }
    if all || suite == Suite::Rho {
        results.extend(rho_suite(settings, coefficients, cone)?);
    }
    Ok(AppendixReport { results })
}

//! Experiment configuration: one JSON document, optionally starting from a
//! named preset that is deep-merged under the user's fields.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::appendix::AppendixSettings;
use crate::coefficients::{CoefficientSet, JumpAtom, SamplerSpec, DEFAULT_TOL, TABLE_TOL};
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::semigroup::DiagonalSemigroup;
use crate::simulate::{NoiseSpec, SimConfig};
use crate::space::{ConeSpec, StateVec};

pub const PRESETS: [&str; 3] = ["heat-positive", "heat-positive-badvol", "heat-positive-adversarial"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dim: usize,
    /// Cone signs in `{1, -1, 0}`; the nonnegative orthant when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rates {
    Explicit(Vec<f64>),
    Named(RateFamily),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateFamily {
    /// `c_k = k`.
    Heat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupConfig {
    pub rates: Rates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    pub weight: f64,
    pub kernel: MapSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub drift: MapSpec,
    #[serde(default)]
    pub vol: Vec<MapSpec>,
    #[serde(default)]
    pub jumps: Vec<JumpConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// `lambda_j`; `2^{-j}` per volatility column when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_eigenvalues: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckerConfig {
    /// Defaults to 1e-9, or 1e-6 when a coefficient uses a table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub sampler: SamplerSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Step sizes of the refinement sweep; just `sim.dt` when empty.
    pub dt_sweep: Vec<f64>,
    /// Exit fraction below which a simulation counts as "no exits".
    pub agreement_threshold: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dt_sweep: Vec::new(),
            agreement_threshold: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    pub semigroup: SemigroupConfig,
    pub coefficients: CoefficientConfig,
    pub noise: NoiseConfig,
    pub sim: SimConfig,
    /// Initial state; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
    #[serde(default)]
    pub checker: CheckerConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub appendix: AppendixSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// Validated, constructed objects of an experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub cone: ConeSpec,
    pub semigroup: DiagonalSemigroup,
    pub coefficients: CoefficientSet,
    pub noise: NoiseSpec,
    pub initial: StateVec,
    pub tol: f64,
}

fn field(path: &str, e: Error) -> Error {
    match e {
        Error::Config(msg) => Error::Config(format!("{path}: {msg}")),
        other => Error::Config(format!("{path}: {other}")),
    }
}

fn heat_positive() -> Value {
    let n = 16;
    let vol: Vec<Value> = (0..8).map(|_| json!({"family": "proportional", "scale": 0.3})).collect();
    json!({
        "space": {"dim": n},
        "semigroup": {"rates": "heat"},
        "coefficients": {
            "drift": {"family": "mean_reversion", "kappa": 1.0, "b": vec![0.5; n]},
            "vol": vol,
            "jumps": [{"weight": 0.2, "kernel": {"family": "constant", "value": vec![0.1; n]}}]
        },
        "noise": {"q_eigenvalues": vec![1.0; 8], "seed": 20_240_601},
        "sim": {"dt": 1e-3, "horizon": 1.0, "paths": 200, "exit_tol": 1e-8},
        "initial": vec![0.0; n],
        "verify": {"dt_sweep": [4e-3, 2e-3, 1e-3], "agreement_threshold": 0.01}
    })
}

/// The named preset as a JSON document.
pub fn preset(name: &str) -> Result<Value> {
    let mut doc = heat_positive();
    match name {
        "heat-positive" => {}
        "heat-positive-badvol" => {
            let mut bad = vec![0.0; 16];
            bad[0] = 0.3;
            let c = &mut doc["coefficients"];
            c["vol"]
                .as_array_mut()
                .expect("preset vol is an array")
                .push(json!({"family": "constant", "value": bad}));
            doc["noise"]["q_eigenvalues"] = json!(vec![1.0; 9]);
        }
        "heat-positive-adversarial" => {
            // outward drift in a small ball around a face point that the
            // default sampler does not visit
            let mut center = vec![0.5; 16];
            center[0] = 0.0;
            let mut e1 = vec![0.0; 16];
            e1[0] = 1.0;
            doc["coefficients"]["drift"] = json!({
                "family": "sum",
                "terms": [
                    {"family": "mean_reversion", "kappa": 1.0, "b": vec![0.5; 16]},
                    {"family": "bump", "center": center, "radius": 0.2, "direction": e1, "amplitude": -1.0}
                ]
            });
            doc["initial"] = json!(center);
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; known presets: {}",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(doc)
}

/// Objects merge key by key; everything else in `over` replaces `base`.
pub fn deep_merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => deep_merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn syntax_error(e: serde_json::Error) -> Error {
    Error::Config(format!("invalid JSON at line {} column {}: {e}", e.line(), e.column()))
}

impl ExperimentConfig {
    /// Parses a config document. A `"preset"` key (or `preset_override`)
    /// expands to the preset document, with the remaining fields merged
    /// over it. Errors name the offending field.
    pub fn parse(text: &str, preset_override: Option<&str>) -> Result<Self> {
        let mut doc: Value = serde_json::from_str(text).map_err(syntax_error)?;
        let named = match doc.as_object_mut() {
            Some(obj) => match obj.remove("preset") {
                Some(Value::String(s)) => Some(s),
                Some(other) => return Err(Error::Config(format!("preset: expected a string, got {other}"))),
                None => None,
            },
            None => return Err(Error::Config("config must be a JSON object".into())),
        };
        let cfg = match preset_override.map(str::to_owned).or(named) {
            Some(name) => {
                let mut base = preset(&name)?;
                deep_merge(&mut base, doc);
                Self::from_value(base)?
            }
            None => {
                // straight from the text so diagnostics carry line numbers
                let de = &mut serde_json::Deserializer::from_str(text);
                serde_path_to_error::deserialize(de)
                    .map_err(|e| Error::Config(format!("{}: {}", e.path(), e.inner())))?
            }
        };
        cfg.build()?;
        Ok(cfg)
    }

    pub fn from_value(doc: Value) -> Result<Self> {
        serde_path_to_error::deserialize(doc).map_err(|e| Error::Config(format!("{}: {}", e.path(), e.inner())))
    }

    pub fn from_preset(name: &str) -> Result<Self> {
        let cfg = Self::from_value(preset(name)?)?;
        cfg.build()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path, preset_override: Option<&str>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, preset_override)
    }

    /// Pretty JSON with sorted keys and defaults filled in.
    pub fn canonical_json(&self) -> Result<String> {
        let v = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&v)?)
    }

    /// Step sizes of the verification sweep.
    pub fn dt_sweep(&self) -> Vec<f64> {
        if self.verify.dt_sweep.is_empty() {
            vec![self.sim.dt]
        } else {
            self.verify.dt_sweep.clone()
        }
    }

    fn uses_table(&self) -> bool {
        let c = &self.coefficients;
        c.drift.uses_table() || c.vol.iter().any(MapSpec::uses_table) || c.jumps.iter().any(|j| j.kernel.uses_table())
    }

    /// Validates cross-field consistency and constructs every object.
    pub fn build(&self) -> Result<Experiment> {
        let dim = self.space.dim;
        if dim == 0 {
            return Err(Error::Config("space.dim: must be >= 1".into()));
        }
        let cone = match &self.space.signs {
            Some(s) if s.len() != dim => {
                return Err(Error::Config(format!("space.signs: expected {dim} entries, got {}", s.len())))
            }
            Some(s) => ConeSpec::new(s.clone()).map_err(|e| field("space.signs", e))?,
            None => ConeSpec::nonnegative(dim),
        };
        let semigroup = match &self.semigroup.rates {
            Rates::Named(RateFamily::Heat) => DiagonalSemigroup::heat(dim),
            Rates::Explicit(r) if r.len() != dim => {
                return Err(Error::Config(format!("semigroup.rates: expected {dim} entries, got {}", r.len())))
            }
            Rates::Explicit(r) => DiagonalSemigroup::new(r.clone()),
        }
        .map_err(|e| field("semigroup.rates", e))?;

        let c = &self.coefficients;
        let drift = c.drift.build(dim, None).map_err(|e| field("coefficients.drift", e))?;
        let vol = c
            .vol
            .iter()
            .enumerate()
            .map(|(j, s)| s.build(dim, Some(j)).map_err(|e| field(&format!("coefficients.vol[{j}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        let jumps = c
            .jumps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                Ok(JumpAtom {
                    weight: a.weight,
                    kernel: a.kernel.build(dim, None).map_err(|e| field(&format!("coefficients.jumps[{i}].kernel"), e))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let coefficients = CoefficientSet::new(dim, drift, vol, jumps).map_err(|e| field("coefficients.jumps", e))?;

        let columns = coefficients.columns();
        let noise = match &self.noise.q_eigenvalues {
            Some(q) if q.len() > columns => {
                return Err(Error::Config(format!(
                    "noise.q_eigenvalues: {} entries but only {columns} volatility columns",
                    q.len()
                )))
            }
            Some(q) => NoiseSpec::new(q.clone(), self.noise.seed).map_err(|e| field("noise.q_eigenvalues", e))?,
            None => NoiseSpec::geometric(columns, self.noise.seed),
        };

        self.sim.validate().map_err(|e| field("sim", e))?;
        for (i, &dt) in self.verify.dt_sweep.iter().enumerate() {
            SimConfig { dt, ..self.sim.clone() }
                .validate()
                .map_err(|e| field(&format!("verify.dt_sweep[{i}]"), e))?;
        }
        if !(0.0..=1.0).contains(&self.verify.agreement_threshold) {
            return Err(Error::Config("verify.agreement_threshold: must lie in [0, 1]".into()));
        }

        let initial = match &self.initial {
            Some(v) if v.len() != dim => {
                return Err(Error::Config(format!("initial: expected {dim} entries, got {}", v.len())))
            }
            Some(v) => StateVec::new(v.clone()).map_err(|e| field("initial", e))?,
            None => StateVec::zeros(dim),
        };
        coefficients.validate_at(&initial).map_err(|e| field("coefficients", e))?;

        let tol = match self.checker.tol {
            Some(t) if !(t >= 0.0) => return Err(Error::Config(format!("checker.tol: must be >= 0, got {t}"))),
            Some(t) => t,
            None if self.uses_table() => TABLE_TOL,
            None => DEFAULT_TOL,
        };
        self.appendix.validate().map_err(|e| field("appendix", e))?;

        Ok(Experiment {
            config: self.clone(),
            cone,
            semigroup,
            coefficients,
            noise,
            initial,
            tol,
        })
    }
}

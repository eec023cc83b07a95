//! The `check`, `simulate`, `verify` and `appendix` commands: load an
//! experiment, run it, and write JSON reports and CSV tables to an output
//! directory.
//!
//! Every output carries the content hash of the canonical config, and
//! `manifest.json` lists the hash of every file written.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::appendix::{run_suite, AppendixReport, Suite};
use crate::coefficients::{invariance_verdict, sample_points, ConditionReport, Verdict};
use crate::config::{Experiment, ExperimentConfig};
use crate::error::{Error, Result};
use crate::simulate::{run_ensemble, PathEnsemble, SimConfig};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FINDING: i32 = 2;

/// Command-line overrides applied on top of the config document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub dt: Option<f64>,
}

/// Loads the config (or just the preset when `path` is `None`), applies the
/// overrides and validates the result.
pub fn load_experiment(path: Option<&Path>, ov: &Overrides) -> Result<Experiment> {
    let mut cfg = match (path, ov.preset.as_deref()) {
        (Some(p), preset) => ExperimentConfig::load(p, preset)?,
        (None, Some(name)) => ExperimentConfig::from_preset(name)?,
        (None, None) => return Err(Error::Config("either --config or --preset is required".into())),
    };
    if let Some(seed) = ov.seed {
        cfg.noise.seed = seed;
    }
    if let Some(paths) = ov.paths {
        cfg.sim.paths = paths;
    }
    if let Some(dt) = ov.dt {
        cfg.sim.dt = dt;
        cfg.verify.dt_sweep = vec![dt];
    }
    cfg.build()
}

/// Caps the global worker pool at `CONE_SPDE_THREADS` when it is set.
pub fn init_threads_from_env() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var("CONE_SPDE_THREADS") else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("CONE_SPDE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Internal(e.to_string()))?;
    Ok(Some(n))
}

/// Git-style blob hash: `sha256("blob <len>\0" ++ bytes)`, hex encoded.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub outputs: Vec<OutputFile>,
}

/// Collects output files for one command run.
struct Outputs {
    dir: PathBuf,
    command: String,
    config_hash: String,
    config: serde_json::Value,
    files: Vec<OutputFile>,
}

impl Outputs {
    fn new(dir: &Path, command: &str, cfg: &ExperimentConfig) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let canonical = cfg.canonical_json()?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.into(),
            config_hash: content_hash(canonical.as_bytes()),
            config: serde_json::from_str(&canonical)?,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.files.push(OutputFile {
            file: name.into(),
            sha256: content_hash(bytes),
        });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut v = serde_json::to_value(value)?;
        if let Some(obj) = v.as_object_mut() {
            obj.insert("config_hash".into(), self.config_hash.clone().into());
        }
        let mut text = serde_json::to_string_pretty(&v)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn finish(self) -> Result<Manifest> {
        let m = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            config_hash: self.config_hash,
            config: self.config,
            outputs: self.files,
        };
        let mut text = serde_json::to_string_pretty(&m)?;
        text.push('\n');
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(m)
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// One row per path: `seed,exited,exit_time,min_margin,diverged_at,config_hash`.
fn paths_csv(e: &PathEnsemble, hash: &str) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "exited", "exit_time", "min_margin", "diverged_at", "config_hash"])?;
    for p in &e.paths {
        w.write_record([
            p.seed.to_string(),
            u8::from(p.exited(e.exit_tol)).to_string(),
            fmt_opt(p.exit_time),
            if p.diverged_at.is_some() { String::new() } else { format!("{:e}", p.min_margin) },
            p.diverged_at.map(|s| s.to_string()).unwrap_or_default(),
            hash.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// `t,r_0,...,r_{N-1},config_hash` for a recorded single path.
fn trajectory_csv(e: &PathEnsemble, hash: &str) -> Result<Option<Vec<u8>>> {
    let Some(tr) = e.paths.first().and_then(|p| p.trajectory.as_ref()) else {
        return Ok(None);
    };
    let dim = tr.states.first().map_or(0, |s| s.dim());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((0..dim).map(|k| format!("r_{k}")));
    header.push("config_hash".into());
    w.write_record(&header)?;
    for (t, r) in tr.times.iter().zip(&tr.states) {
        let mut row = vec![format!("{t:e}")];
        row.extend(r.coords().iter().map(|x| format!("{x:e}")));
        row.push(hash.to_string());
        w.write_record(&row)?;
    }
    Ok(Some(w.into_inner().map_err(|e| Error::Io(e.into_error()))?))
}

/// Checker output.
#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub verdict: Verdict,
    pub report: ConditionReport,
}

impl CheckSummary {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::NoViolationFound => EXIT_OK,
            Verdict::Violated => EXIT_FINDING,
        }
    }
}

fn run_checker(exp: &Experiment) -> Result<ConditionReport> {
    let samples = sample_points(&exp.cone, &exp.config.checker.sampler);
    invariance_verdict(&exp.coefficients, &exp.semigroup, &exp.cone, &samples, exp.tol)
}

/// Runs the sampled invariance checks and writes `check.json`.
pub fn cmd_check(exp: &Experiment, out: &Path) -> Result<CheckSummary> {
    let mut files = Outputs::new(out, "check", &exp.config)?;
    let report = run_checker(exp)?;
    let summary = CheckSummary {
        verdict: report.verdict,
        report,
    };
    files.write_json("check.json", &summary)?;
    files.finish()?;
    Ok(summary)
}

/// Exit statistics of one ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub dt: f64,
    pub paths: usize,
    pub valid: usize,
    pub diverged: usize,
    pub exits: usize,
    pub exit_fraction: f64,
    pub stderr: f64,
}

impl SweepRow {
    fn from_ensemble(e: &PathEnsemble) -> Self {
        Self {
            dt: e.dt,
            paths: e.paths.len(),
            valid: e.valid(),
            diverged: e.diverged(),
            exits: e.exits(e.exit_tol),
            exit_fraction: e.exit_fraction(e.exit_tol),
            stderr: e.exit_stderr(e.exit_tol),
        }
    }
}

fn run_at(exp: &Experiment, sim: &SimConfig) -> Result<PathEnsemble> {
    run_ensemble(&exp.semigroup, &exp.coefficients, &exp.cone, &exp.noise, sim, &exp.initial)
}

/// Simulation output of `cmd_simulate`.
#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub summary: SweepRow,
    pub exit_tol: f64,
    pub master_seed: u64,
}

/// Runs one ensemble and writes `paths.csv`, `simulate.json` and, for a
/// single recorded path, `trajectory.csv`.
pub fn cmd_simulate(exp: &Experiment, out: &Path) -> Result<(SimulateSummary, PathEnsemble)> {
    let mut files = Outputs::new(out, "simulate", &exp.config)?;
    let mut sim = exp.config.sim.clone();
    if sim.paths == 1 && sim.record_every.is_none() {
        sim.record_every = Some(1);
    }
    let e = run_at(exp, &sim)?;
    let hash = files.config_hash.clone();
    files.write("paths.csv", &paths_csv(&e, &hash)?)?;
    if let Some(bytes) = trajectory_csv(&e, &hash)? {
        files.write("trajectory.csv", &bytes)?;
    }
    let summary = SimulateSummary {
        summary: SweepRow::from_ensemble(&e),
        exit_tol: e.exit_tol,
        master_seed: e.master_seed,
    };
    files.write_json("simulate.json", &summary)?;
    files.finish()?;
    Ok((summary, e))
}

/// Checker verdict next to the simulated exit statistics.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub checker: ConditionReport,
    pub sweep: Vec<SweepRow>,
    pub agreement_threshold: f64,
    /// `NoViolationFound` with finest-step exit fraction below the
    /// threshold, or `Violated` with exits observed at the finest step.
    pub agreement: bool,
}

/// Agreement rule between the checker verdict and the finest row.
pub fn agreement(verdict: Verdict, finest: &SweepRow, threshold: f64) -> bool {
    match verdict {
        Verdict::NoViolationFound => finest.exit_fraction < threshold,
        Verdict::Violated => finest.exits > 0,
    }
}

/// Checker plus a step-size sweep. Writes `verify.json`, `sweep.csv` and
/// `paths_<i>.csv` per sweep entry. Disagreement is reported, not an error.
pub fn cmd_verify(exp: &Experiment, out: &Path) -> Result<VerdictReport> {
    let mut files = Outputs::new(out, "verify", &exp.config)?;
    let hash = files.config_hash.clone();
    let checker = run_checker(exp)?;
    let mut sweep = Vec::new();
    for (i, dt) in exp.config.dt_sweep().into_iter().enumerate() {
        let sim = SimConfig {
            dt,
            ..exp.config.sim.clone()
        };
        let e = run_at(exp, &sim)?;
        files.write(&format!("paths_{i}.csv"), &paths_csv(&e, &hash)?)?;
        sweep.push(SweepRow::from_ensemble(&e));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dt", "paths", "valid", "diverged", "exits", "exit_fraction", "stderr", "config_hash"])?;
    for r in &sweep {
        w.write_record([
            format!("{:e}", r.dt),
            r.paths.to_string(),
            r.valid.to_string(),
            r.diverged.to_string(),
            r.exits.to_string(),
            format!("{:e}", r.exit_fraction),
            format!("{:e}", r.stderr),
            hash.clone(),
        ])?;
    }
    files.write("sweep.csv", &w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;

    let finest = sweep
        .iter()
        .min_by(|a, b| a.dt.total_cmp(&b.dt))
        .copied()
        .ok_or_else(|| Error::Internal("empty step-size sweep".into()))?;
    let threshold = exp.config.verify.agreement_threshold;
    let report = VerdictReport {
        verdict: checker.verdict,
        agreement: agreement(checker.verdict, &finest, threshold),
        checker,
        sweep,
        agreement_threshold: threshold,
    };
    files.write_json("verify.json", &report)?;
    files.finish()?;
    Ok(report)
}

/// Runs the selected invariant suites and writes `appendix.json`.
pub fn cmd_appendix(exp: &Experiment, suite: Suite, out: &Path) -> Result<AppendixReport> {
    let mut files = Outputs::new(out, &format!("appendix {suite}"), &exp.config)?;
    let report = run_suite(suite, &exp.config.appendix, &exp.coefficients, &exp.cone)?;
    files.write_json("appendix.json", &report)?;
    files.finish()?;
    Ok(report)
}

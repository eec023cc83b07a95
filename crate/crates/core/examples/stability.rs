//! Coupled-noise stability runs: projected drifts and truncated noise
//! converge to the limit system.

use cone_spde::approx::{project_coefficients, truncate_noise};
use cone_spde::config::ExperimentConfig;
use cone_spde::simulate::{stability_experiment, SimConfig};
use serde_json::json;

fn main() -> cone_spde::Result<()> {
    let mut doc = cone_spde::config::preset("heat-positive")?;
    let b: Vec<f64> = (1..=16).map(|k| 0.5_f64.powi(k)).collect();
    doc["coefficients"]["drift"]["b"] = json!(b);
    let exp = ExperimentConfig::from_value(doc)?.build()?;
    let sim = SimConfig {
        paths: 50,
        ..exp.config.sim.clone()
    };

    let seq = [2, 4, 8, 16]
        .into_iter()
        .map(|n| Ok((n, project_coefficients(&exp.coefficients, n)?)))
        .collect::<cone_spde::Result<Vec<_>>>()?;
    let pts = stability_experiment(&exp.semigroup, &exp.coefficients, &seq, &exp.cone, &exp.noise, &sim, &exp.initial)?;
    println!("projected drift Pi_n o alpha");
    for p in &pts {
        println!("  n={:>2}  E sup|r - r^n|^2 = {:.4e} +- {:.1e}", p.index, p.mean, p.stderr);
    }

    let seq = [1, 2, 4, 8]
        .into_iter()
        .map(|n| Ok((n, truncate_noise(&exp.coefficients, n)?)))
        .collect::<cone_spde::Result<Vec<_>>>()?;
    let pts = stability_experiment(&exp.semigroup, &exp.coefficients, &seq, &exp.cone, &exp.noise, &sim, &exp.initial)?;
    println!("truncated noise T_n sigma");
    for p in &pts {
        println!("  n={:>2}  E sup|r - r^n|^2 = {:.4e} +- {:.1e}", p.index, p.mean, p.stderr);
    }
    Ok(())
}

//! Monte Carlo cone-exit statistics for the compliant and the violating
//! preset, plus a single recorded path.

use cone_spde::config::ExperimentConfig;
use cone_spde::simulate::{run_ensemble, simulate_path, SimConfig};

fn main() -> cone_spde::Result<()> {
    for name in ["heat-positive", "heat-positive-badvol"] {
        let exp = ExperimentConfig::from_preset(name)?.build()?;
        let sim = SimConfig {
            paths: 100,
            ..exp.config.sim.clone()
        };
        let e = run_ensemble(&exp.semigroup, &exp.coefficients, &exp.cone, &exp.noise, &sim, &exp.initial)?;
        println!(
            "{name:<22} exit fraction {:.3} +- {:.3} (tol {:e}, {} paths)",
            e.exit_fraction(sim.exit_tol),
            e.exit_stderr(sim.exit_tol),
            sim.exit_tol,
            e.paths.len()
        );
        let first = e.paths.iter().filter_map(|p| p.exit_time).fold(f64::INFINITY, f64::min);
        if first.is_finite() {
            println!("{:<22} earliest exit at t = {first}", "");
        }
    }

    let exp = ExperimentConfig::from_preset("heat-positive")?.build()?;
    let sim = SimConfig {
        record_every: Some(250),
        ..exp.config.sim.clone()
    };
    let path = simulate_path(&exp.semigroup, &exp.coefficients, &exp.cone, &exp.noise, &sim, &exp.initial)?;
    for (t, r) in path.trajectory.iter().flat_map(|tr| tr.times.iter().zip(&tr.states)) {
        println!("t={t:.2}  r_1={:.4}  r_2={:.4}  |r|={:.4}", r[0], r[1], r.norm());
    }
    Ok(())
}

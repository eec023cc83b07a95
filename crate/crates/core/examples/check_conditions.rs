//! Sampled check of the jump, drift and volatility conditions for the
//! compliant heat preset and for the same setup with a constant volatility
//! column added.

use cone_spde::coefficients::{invariance_verdict, sample_points};
use cone_spde::config::ExperimentConfig;

fn main() -> cone_spde::Result<()> {
    for name in ["heat-positive", "heat-positive-badvol"] {
        let exp = ExperimentConfig::from_preset(name)?.build()?;
        let samples = sample_points(&exp.cone, &exp.config.checker.sampler);
        let report = invariance_verdict(&exp.coefficients, &exp.semigroup, &exp.cone, &samples, exp.tol)?;

        println!("{name}: {} over {} points", report.verdict, report.sampled_points);
        for o in &report.outcomes {
            println!(
                "  {:<10} ok={:<5} evaluated={:<5} violations={:<4} min margin={:.3e}",
                format!("{:?}", o.condition),
                o.ok,
                o.evaluated,
                o.violations,
                o.min_margin
            );
        }
        let first = report.witnesses().next().cloned();
        if let Some(w) = first {
            println!(
                "  first witness: {:?} on face {:?}, column {:?}, magnitude {}",
                w.condition,
                w.functional.map(|f| f.index),
                w.component,
                w.magnitude
            );
        }
    }
    Ok(())
}

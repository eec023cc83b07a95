//! End-to-end run of the verify command: checker, step-size sweep and the
//! agreement flag, with outputs written to a temporary directory.

use cone_spde::runner::{cmd_verify, load_experiment, Overrides};

fn main() -> cone_spde::Result<()> {
    let out = std::env::temp_dir().join("cone-spde-verify-example");
    for preset in ["heat-positive", "heat-positive-badvol", "heat-positive-adversarial"] {
        let ov = Overrides {
            preset: Some(preset.into()),
            paths: Some(100),
            ..Overrides::default()
        };
        let exp = load_experiment(None, &ov)?;
        let report = cmd_verify(&exp, &out.join(preset))?;
        println!("{preset}: {} / agreement = {}", report.verdict, report.agreement);
        for r in &report.sweep {
            println!("    dt={:e}  exits {:>3}/{}  fraction {:.3}", r.dt, r.exits, r.valid, r.exit_fraction);
        }
    }
    println!("outputs in {}", out.display());
    Ok(())
}

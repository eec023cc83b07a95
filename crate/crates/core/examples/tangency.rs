//! Small-time tangency estimate of `alpha - rho + sigma u` at boundary
//! points of the compliant preset.

use cone_spde::approx::DEFAULT_FD_STEP;
use cone_spde::coefficients::{sample_points, SamplerSpec};
use cone_spde::config::ExperimentConfig;
use cone_spde::maps::{Constant, FnMap};
use cone_spde::semigroup::LiminfGrid;
use cone_spde::simulate::{ssnc_direction, ssnc_estimate};
use cone_spde::space::StateVec;

fn main() -> cone_spde::Result<()> {
    let exp = ExperimentConfig::from_preset("heat-positive")?.build()?;
    let c = &exp.coefficients;
    let grid = LiminfGrid::down_to(1e-1, 1e-6);
    let u: Vec<f64> = (0..c.columns()).map(|j| if j % 2 == 0 { 0.5 } else { -0.5 }).collect();

    let sampler = SamplerSpec {
        per_face: 1,
        interior: 0,
        seed: 3,
        corners: false,
    };
    for (f, h) in sample_points(&exp.cone, &sampler).faces.iter().take(4) {
        let sigma = FnMap(|x: &StateVec| ssnc_direction(c, x, &u, DEFAULT_FD_STEP).unwrap());
        let inward = ssnc_estimate(&exp.semigroup, &sigma, &exp.cone, h, &grid)?;
        let outward = Constant(StateVec::unit(h.dim(), f.index)?.scaled(-1.0));
        let out = ssnc_estimate(&exp.semigroup, &outward, &exp.cone, h, &grid)?;
        println!("face {:>2}: compliant {inward:.2e}   outward {out:.3}", f.index);
    }
    Ok(())
}

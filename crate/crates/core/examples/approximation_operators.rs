//! Boundary shifts, retractions, projections and a numeric Lipschitz probe.

use std::sync::Arc;

use cone_spde::approx::{compose_retraction, dyadic_eps, lipschitz_probe, BallSpec, BoundaryShift, PhiEps};
use cone_spde::maps::{Diagonal, FnMap, SharedMap, VectorMap};
use cone_spde::space::{project, retract, StateVec};

fn main() -> cone_spde::Result<()> {
    let phi = PhiEps::new(0.1)?;
    for x in [-0.5, -0.1, 0.05, 0.1, 0.3] {
        println!("phi_0.1({x:>5}) = {:>5.2}", phi.apply(x));
    }

    let h = StateVec::new(vec![0.3, -0.05, 0.7, 1.2])?;
    let shift = BoundaryShift::dyadic(3, 4)?;
    println!("eps_3 = {}, Phi_3(h) = {:?}", dyadic_eps(3), shift.eval(&h).coords());
    println!("Pi_2 h = {:?}", project(&h, 2)?.coords());
    println!("R_1 h  = {:?} (|h| = {:.3})", retract(&h, 1.0)?.coords(), h.norm());

    let ball = BallSpec {
        center: StateVec::zeros(4),
        radius: 5.0,
    };
    let f: SharedMap = Arc::new(Diagonal::new(vec![3.0, -1.0, 0.5, 2.0]));
    let g = compose_retraction(f.clone(), 1.0)?;
    println!("Lip(f)       ~ {:.4}", lipschitz_probe(f.as_ref(), 20_000, &ball, 1)?);
    println!("Lip(f o R_1) ~ {:.4}", lipschitz_probe(g.as_ref(), 20_000, &ball, 1)?);
    let sq = FnMap(|h: &StateVec| StateVec::new(vec![h[0] * h[0], 0.0, 0.0, 0.0]).unwrap());
    println!("Lip(h_1^2) on radius 5 ~ {:.4} (exact 10)", lipschitz_probe(&sq, 20_000, &ball, 2)?);
    Ok(())
}

//! Diagonal semigroups, resolvents and the boundary set used by the drift
//! condition.

use cone_spde::semigroup::{DiagonalSemigroup, LiminfGrid};
use cone_spde::space::{ConeSpec, Functional, StateVec};

fn main() -> cone_spde::Result<()> {
    let s = DiagonalSemigroup::heat(4)?;
    let h = StateVec::new(vec![1.0, 0.0, 2.0, 0.5])?;

    println!("S_0.1 h      = {:?}", s.apply(0.1, &h)?.coords());
    println!("A h          = {:?}", s.generator(&h)?.coords());
    println!("R(2) h       = {:?}", s.resolvent(2.0, &h)?.coords());
    println!("beta = {}, |S_1| = {:.4}", s.beta(), s.operator_norm(1.0));

    let cone = ConeSpec::nonnegative(4);
    println!("S preserves K? {}", s.preserves_cone(&cone)?);

    // <e_k, S_t h> / t over a shrinking grid: finite only where h_k = 0
    let grid = LiminfGrid::down_to(1e-1, 1e-8);
    for k in [0, 1] {
        let b = s.boundary_membership(&cone, Functional::new(1, k)?, &h, &grid)?;
        println!(
            "k={k}: in D? {:5}  a = {:?}  tail min = {:.3e}",
            b.in_boundary_set(),
            b.a_value,
            b.grid_estimate.tail_min
        );
    }
    Ok(())
}

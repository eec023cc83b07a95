//! Coordinate cones: membership, distance, projection and the cone order.

use cone_spde::space::{ConeSpec, Functional, StateVec};

fn main() -> cone_spde::Result<()> {
    // h_1 >= 0, h_2 <= 0, h_3 free
    let cone = ConeSpec::new(vec![1, -1, 0])?;
    let h = StateVec::new(vec![-0.3, 0.4, 2.0])?;

    println!("h            = {:?}", h.coords());
    println!("in K?          {}", cone.contains(&h, 0.0)?);
    println!("min margin     {}", cone.min_margin(&h));
    println!("d_K(h)         {:.6}", cone.distance(&h)?);
    println!("P_K(h)       = {:?}", cone.project_onto(&h)?.coords());

    for f in cone.generators() {
        println!("generator {:?}: <h*, h> = {}", f, f.pair(&h));
    }
    let not_a_generator = Functional::new(1, 2)?;
    println!("e_3 generates K*? {}", cone.is_generator(not_a_generator));

    let g = StateVec::new(vec![-1.0, 1.0, 2.0])?;
    println!("g <=_K h?      {}", cone.leq(&g, &h)?);
    Ok(())
}

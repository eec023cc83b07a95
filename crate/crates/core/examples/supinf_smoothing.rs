//! Inf-convolution and sup-inf convolution of `min(|x|, 1)`; the latter
//! has a Lipschitz gradient.

use cone_spde::approx::{inf_convolve, sup_inf_convolve, SearchSpec, SupInfParams};
use cone_spde::space::StateVec;

fn main() -> cone_spde::Result<()> {
    let f = |g: &StateVec| g[0].abs().min(1.0);
    let search = SearchSpec::for_function(1.0, 1.0);
    let p = SupInfParams::new(0.1, 0.02)?;
    println!("gradient Lipschitz bound {}", p.gradient_lipschitz());
    println!("{:>6} {:>8} {:>10} {:>10}", "x", "f", "f_lambda", "(f_l)^m");
    for i in -12..=12 {
        let x = i as f64 * 0.1;
        let h = StateVec::new(vec![x])?;
        println!(
            "{x:>6.2} {:>8.4} {:>10.5} {:>10.5}",
            f(&h),
            inf_convolve(&f, p.lambda(), &h, &search)?,
            sup_inf_convolve(&f, p, &h, &search)?
        );
    }
    Ok(())
}

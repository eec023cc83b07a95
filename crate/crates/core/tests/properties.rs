use cone_spde::approx::{BoundaryShift, PhiEps};
use cone_spde::maps::VectorMap;
use cone_spde::semigroup::DiagonalSemigroup;
use cone_spde::simulate::{derive_seed, poisson_inverse_cdf, NoiseSpec, NoiseStream, StepNoise};
use cone_spde::space::{project, retract, ConeSpec, StateVec};
use proptest::prelude::*;

fn vec_of(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, dim)
}

fn signs(dim: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8), Just(0i8)], dim)
}

proptest! {
    #[test]
    fn projection_realizes_distance(s in signs(6), x in vec_of(6), y in vec_of(6)) {
        let cone = ConeSpec::new(s).unwrap();
        let h = StateVec::new(x).unwrap();
        let p = cone.project_onto(&h).unwrap();
        prop_assert!(cone.contains(&p, 0.0).unwrap());
        prop_assert!((p.distance(&h) - cone.distance(&h).unwrap()).abs() <= 1e-12 * (1.0 + h.norm()));
        // any other cone point is no closer
        let q = cone.project_onto(&StateVec::new(y).unwrap()).unwrap();
        prop_assert!(q.distance(&h) >= cone.distance(&h).unwrap() - 1e-9);
    }

    #[test]
    fn cone_order_is_additive(s in signs(5), x in vec_of(5), y in vec_of(5)) {
        let cone = ConeSpec::new(s).unwrap();
        let a = cone.project_onto(&StateVec::new(x).unwrap()).unwrap();
        let b = cone.project_onto(&StateVec::new(y).unwrap()).unwrap();
        prop_assert!(cone.contains(&a.add(&b), 0.0).unwrap());
        prop_assert!(cone.leq(&StateVec::zeros(5), &a).unwrap());
    }

    #[test]
    fn retraction_is_nonexpansive(x in vec_of(8), y in vec_of(8), r in 0.1..30.0f64) {
        let (h, g) = (StateVec::new(x).unwrap(), StateVec::new(y).unwrap());
        let (rh, rg) = (retract(&h, r).unwrap(), retract(&g, r).unwrap());
        prop_assert!(rh.distance(&rg) <= h.distance(&g) * (1.0 + 1e-12) + 1e-15);
        prop_assert!(rh.norm() <= r * (1.0 + 1e-12));
    }

    #[test]
    fn projection_truncates(x in vec_of(7), n in 0usize..=7) {
        let h = StateVec::new(x).unwrap();
        let p = project(&h, n).unwrap();
        for k in 0..7 {
            prop_assert_eq!(p[k], if k < n { h[k] } else { 0.0 });
        }
    }

    #[test]
    fn phi_properties(x in -20.0..20.0f64, y in -20.0..20.0f64, eps in 1e-4..5.0f64) {
        let p = PhiEps::new(eps).unwrap();
        prop_assert!((p.apply(x) - x).abs() <= eps * (1.0 + 1e-12));
        prop_assert!((p.apply(x) - p.apply(y)).abs() <= (x - y).abs() + 1e-12);
        if x.abs() < eps {
            prop_assert_eq!(p.apply(x), 0.0);
        }
        prop_assert_eq!(p.apply(x).signum() * p.apply(x), p.apply(x).abs());
    }

    #[test]
    fn boundary_shift_lipschitz(x in vec_of(4), y in vec_of(4), n in 0usize..=4) {
        let shift = BoundaryShift::dyadic(n, 4).unwrap();
        let (h, g) = (StateVec::new(x).unwrap(), StateVec::new(y).unwrap());
        prop_assert!(shift.eval(&h).distance(&shift.eval(&g)) <= BoundaryShift::LIPSCHITZ * h.distance(&g) + 1e-12);
    }

    #[test]
    fn semigroup_property(rates in prop::collection::vec(-2.0..10.0f64, 4), x in vec_of(4), t in 0.0..2.0f64, s in 0.0..2.0f64) {
        let sg = DiagonalSemigroup::new(rates).unwrap();
        let h = StateVec::new(x).unwrap();
        let lhs = sg.apply(t, &sg.apply(s, &h).unwrap()).unwrap();
        let rhs = sg.apply(t + s, &h).unwrap();
        prop_assert!(lhs.distance(&rhs) <= 1e-10 * (1.0 + rhs.norm()));
        prop_assert!(sg.apply(t, &h).unwrap().norm() <= (sg.beta() * t).exp() * h.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn poisson_inverse_cdf_is_monotone(u in 0.0..1.0f64, v in 0.0..1.0f64, mean in 0.0..5.0f64) {
        let (a, b) = (u.min(v), u.max(v));
        prop_assert!(poisson_inverse_cdf(a, mean) <= poisson_inverse_cdf(b, mean));
    }
}

#[test]
fn wiener_increments_have_variance_lambda_dt() {
    let spec = NoiseSpec::new(vec![1.0, 0.25, 0.01], derive_seed(1, 2)).unwrap();
    let dt = 1e-3;
    let n = 100_000;
    let mut stream = NoiseStream::new(&spec, spec.seed);
    let mut draws = StepNoise::default();
    let mut sq = [0.0; 3];
    let mut quad = [0.0; 3];
    for _ in 0..n {
        stream.next_step(dt, 0, &mut draws);
        for j in 0..3 {
            let x2 = draws.dw[j] * draws.dw[j];
            sq[j] += x2;
            quad[j] += x2 * x2;
        }
    }
    for j in 0..3 {
        let var = sq[j] / n as f64;
        let se = ((quad[j] / n as f64 - var * var) / n as f64).sqrt();
        let target = spec.q_eigenvalues[j] * dt;
        assert!((var - target).abs() < 4.0 * se, "column {j}: {var} vs {target}");
    }
}

#[test]
fn poisson_counts_have_mean_w_dt() {
    let spec = NoiseSpec::new(vec![], 99).unwrap();
    let (w, dt) = (0.2, 1e-3);
    let n = 100_000;
    let mut stream = NoiseStream::new(&spec, spec.seed);
    let mut draws = StepNoise::default();
    let mut total = 0u64;
    for _ in 0..n {
        stream.next_step(dt, 1, &mut draws);
        total += u64::from(poisson_inverse_cdf(draws.uniforms[0], w * dt));
    }
    let mean = total as f64 / n as f64;
    let se = (w * dt / n as f64).sqrt();
    assert!((mean - w * dt).abs() < 4.0 * se, "{mean}");
}

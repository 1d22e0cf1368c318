use cuspbend::cusp_models::{cusp_type, h_inverse, h_product, CuspParameter, ModelDomain, ParaboloidModel};
use cuspbend::hilbert::Location;
use cuspbend::projlin::{act, compose, ProjEquiv, ProjMap, ProjPoint};
use cuspbend::sample;
use cuspbend::scalar::{Mode, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn products_close_and_match_matrices(seed in any::<u64>(), n in 2usize..=5, t_raw in 0usize..5) {
        let t = t_raw % n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = sample::parameter(&mut rng, n, t);
        prop_assert_eq!(cusp_type(&psi), t);
        let a = sample::h_element(&mut rng, &psi).unwrap();
        let b = sample::h_element(&mut rng, &psi).unwrap();
        let ab = h_product(&a, &b).unwrap();
        let direct = compose(a.matrix(), b.matrix()).unwrap();
        prop_assert!(ab.matrix().max_diff(&direct) <= 1e-12 * direct.max_abs().max(1.0));
        let id = h_product(&a, &h_inverse(&a).unwrap()).unwrap();
        prop_assert!(id.matrix().proj_equiv(&ProjMap::identity(n, Mode::Float), 1e-12));
    }

    #[test]
    fn leaves_are_preserved(seed in any::<u64>(), n in 2usize..=5, t_raw in 0usize..5, c in 0.0f64..4.0) {
        let t = t_raw % n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = sample::parameter(&mut rng, n, t);
        let dom = ModelDomain::new(psi.clone()).unwrap();
        let g = sample::h_element(&mut rng, &psi).unwrap();
        let rest: Vec<Scalar> = (0..n - 1)
            .map(|j| Scalar::float(if j < t { 0.3 + j as f64 } else { 1.5 - j as f64 }))
            .collect();
        let p = dom.leaf_point(&Scalar::float(c), &rest).unwrap();
        let back = dom.leaf_coordinate(&p, 1e-9).unwrap();
        prop_assert!((back.value.to_f64() - c).abs() <= 1e-9 * c.max(1.0));
        let q = act(g.matrix(), &p).unwrap();
        let moved = dom.leaf_coordinate(&q, 1e-9).unwrap();
        prop_assert!((moved.value.to_f64() - c).abs() <= 1e-9 * c.max(1.0));
    }

    #[test]
    fn parabolics_preserve_the_paraboloid(v in prop::collection::vec(-3.0f64..3.0, 2), x in prop::collection::vec(-1.0f64..1.0, 3)) {
        let m = ParaboloidModel::new(3);
        let v: Vec<Scalar> = v.into_iter().map(Scalar::float).collect();
        let g = m.parabolic_element(&v).unwrap();
        let p = ProjPoint::from_chart_f64(&[x[0] * x[0] + x[1] * x[1] + 1.0 + x[2].abs(), x[0], x[1]]);
        let before = m.eval(&p, 1e-12).unwrap();
        let after = m.eval(&act(&g, &p).unwrap(), 1e-12).unwrap();
        prop_assert_eq!(before.location, after.location);
    }

    #[test]
    fn scaling_a_parameter_keeps_its_type(values in prop::collection::vec(0.0f64..5.0, 4), r in 0.1f64..10.0) {
        let psi = CuspParameter::from_unsorted(values.iter().map(|&x| Scalar::float(x)).collect()).unwrap();
        let scaled = psi.scaled(&Scalar::float(r)).unwrap();
        prop_assert_eq!(cusp_type(&psi), cusp_type(&scaled));
    }
}

#[test]
fn leaf_zero_is_the_boundary() {
    let psi = CuspParameter::new(vec![Scalar::int(1), Scalar::int(0), Scalar::int(0)]).unwrap();
    let dom = ModelDomain::new(psi).unwrap();
    let p = dom.leaf_point(&Scalar::int(0), &[Scalar::int(1), Scalar::int(2)]).unwrap();
    assert_eq!(dom.leaf_coordinate(&p, 0.0).unwrap().location, Location::Boundary);
}

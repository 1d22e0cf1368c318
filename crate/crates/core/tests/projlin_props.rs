use cuspbend::projlin::{act, compose, conjugate, eigen, inverse, ProjEquiv, ProjMap, ProjPoint};
use cuspbend::scalar::{Mode, Scalar};
use proptest::prelude::*;

fn small_int_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, n + 1), n + 1)
}

fn float_matrix(n: usize) -> impl Strategy<Value = ProjMap> {
    prop::collection::vec(-0.5f64..0.5, (n + 1) * (n + 1)).prop_map(move |v| {
        let rows: Vec<Vec<f64>> =
            (0..=n).map(|r| (0..=n).map(|c| v[r * (n + 1) + c] + if r == c { 2.0 } else { 0.0 }).collect()).collect();
        ProjMap::from_f64_rows(&rows).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_inverse_is_exact(rows in small_int_matrix(3)) {
        if let Ok(m) = ProjMap::from_i64_rows(&rows) {
            let inv = inverse(&m).unwrap();
            prop_assert!(compose(&m, &inv).unwrap().exactly_equals(&ProjMap::identity(3, Mode::Exact)));
        }
    }

    #[test]
    fn composition_is_associative(a in float_matrix(3), b in float_matrix(3), c in float_matrix(3)) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert!(left.proj_equiv(&right, 1e-12));
    }

    #[test]
    fn action_respects_composition(a in float_matrix(2), b in float_matrix(2), x in prop::collection::vec(-3.0f64..3.0, 2)) {
        let p = ProjPoint::from_chart_f64(&x);
        let lhs = act(&compose(&a, &b).unwrap(), &p).unwrap();
        let rhs = act(&a, &act(&b, &p).unwrap()).unwrap();
        prop_assert!(lhs.proj_equiv(&rhs, 1e-12));
    }

    #[test]
    fn scaling_is_projectively_invisible(a in float_matrix(2), k in 0.01f64..100.0) {
        let scaled = a.scale(&Scalar::float(-k));
        prop_assert!(a.proj_equiv(&scaled, 1e-12));
        let inv = inverse(&a).unwrap();
        prop_assert!(compose(&scaled, &inv).unwrap().proj_equiv(&ProjMap::identity(2, Mode::Float), 1e-12));
    }

    #[test]
    fn conjugation_preserves_spectrum(d in prop::collection::vec(0.5f64..4.0, 3), c in float_matrix(2)) {
        let mut d = d;
        d.sort_by(|a, b| b.total_cmp(a));
        prop_assume!(d.windows(2).all(|w| w[0] - w[1] > 0.05));
        let diag = ProjMap::diagonal(&d.iter().map(|&x| Scalar::float(x)).collect::<Vec<_>>()).unwrap();
        let g = conjugate(&c, &diag).unwrap();
        let pairs = eigen(&g).unwrap();
        prop_assert_eq!(pairs.len(), 3);
        for (pair, want) in pairs.iter().zip(&d) {
            prop_assert!((pair.value.re - want).abs() < 1e-8);
            prop_assert!(pair.residual < 1e-8);
        }
    }
}

use nearhole::experiments::{extrapolate, f, PathSection, PathSpec};
use nearhole::kernels::{green2, green_kernel, reflection};
use nearhole::solver::{Regime, RegimeState};
use nearhole::toy::{mobius, mobius_inverse, toy_closed_form};
use proptest::prelude::*;

fn upper() -> impl Strategy<Value = [f64; 2]> {
    (-5.0f64..5.0, 1e-3f64..5.0).prop_map(|(a, b)| [a, b])
}

proptest! {
    #[test]
    fn green_is_symmetric_negative_and_zero_on_axis(x in upper(), y in upper(), a in -5.0f64..5.0) {
        prop_assume!((x[0] - y[0]).hypot(x[1] - y[1]) > 1e-6);
        let g = green2(x, y);
        prop_assert!(g < 0.0);
        prop_assert!((g - green2(y, x)).abs() <= 1e-12 * g.abs().max(1.0));
        prop_assert_eq!(green2([a, 0.0], y), 0.0);
        let g3 = green_kernel::<3>([x[0], a, x[1]], [y[0], 0.5, y[1]]).unwrap().value;
        prop_assert!(g3 < 0.0);
    }

    #[test]
    fn reflection_is_an_involution(x in prop::array::uniform3(-10.0f64..10.0)) {
        prop_assert_eq!(reflection(reflection(x)), x);
        prop_assert_eq!(reflection(x)[2], -x[2]);
    }

    #[test]
    fn toy_solution_bounded_by_its_data(e1 in 0.05f64..2.0, e2 in 0.05f64..0.95, x in upper()) {
        let eps = (e1, e2);
        prop_assume!(x[0].hypot(x[1] - e1) > e1 * e2 * 1.001);
        let u = toy_closed_form(eps, x).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&u));
        let (a, _) = nearhole::toy::mobius_params(eps).unwrap();
        let z = mobius_inverse(a, mobius(a, x));
        prop_assert!((z[0] - x[0]).abs() < 1e-9 * (1.0 + x[0].abs()));
        prop_assert!((z[1] - x[1]).abs() < 1e-9 * (1.0 + x[1].abs()));
    }

    #[test]
    fn extrapolation_exact_on_polynomials(c in prop::array::uniform4(-3.0f64..3.0), t0 in 0.01f64..0.1) {
        let t: Vec<f64> = (1..=7).map(|k| t0 * k as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| c[0] + c[1] * t + c[2] * t * t + c[3] * t * t * t).collect();
        let e = extrapolate(&t, &y, 3).unwrap();
        prop_assert!((e.value - c[0]).abs() < 1e-8);
    }

    #[test]
    fn csv_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = f(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
    }

    #[test]
    fn regime_state_parameters(e1 in 1e-8f64..0.99, e2 in 1e-8f64..0.99) {
        let st = RegimeState::new(Regime::TwoParam, (e1, e2)).unwrap();
        prop_assert!(st.delta.0 < 0.0);
        prop_assert!(st.delta.1 > 0.0 && st.delta.1 < 1.0);
        prop_assert!((st.delta.0 * (e1 * e2).ln() - 1.0).abs() < 1e-12);
        prop_assert_eq!(st.c1(), st.delta.0);
    }

    #[test]
    fn path_ratio_approaches_lambda(lambda in 0.1f64..0.9, a1 in 0.5f64..2.0, a2 in 0.5f64..2.0) {
        let sec = PathSection { lambda, a1, a2, eta: vec![1e-3], degree: 2, eps2: None };
        let p = PathSpec::from_section(&sec, Regime::TwoParam).unwrap();
        let ratio = |eta: f64| {
            let (e1, e2) = p.eps(eta);
            e1.ln() / (e1 * e2).ln()
        };
        prop_assert!((ratio(1e-12) - lambda).abs() < (ratio(1e-3) - lambda).abs() + 1e-15);
        prop_assert!((ratio(1e-12) - lambda).abs() < 0.05);
    }
}

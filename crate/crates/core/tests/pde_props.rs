use pdelab_core::pde::{solve_analytic, solve_fdm, PoissonProblem};
use proptest::prelude::*;

fn problem() -> impl Strategy<Value = PoissonProblem> {
    (
        -10.0f64..10.0,
        -2.0f64..2.0,
        0.1f64..3.0,
        -5.0f64..5.0,
        -5.0f64..5.0,
    )
        .prop_map(|(g, x0, len, y0, y1)| PoissonProblem::new(g, x0, x0 + len, y0, y1).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fdm_is_exact_on_quadratics(p in problem(), n in 3usize..400) {
        let fdm = solve_fdm(&p, n).unwrap();
        let exact = solve_analytic(&p, n).unwrap();
        let err = fdm.values.iter().zip(&exact.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "n={n} err={err}");
    }

    #[test]
    fn boundary_values_are_bit_exact(p in problem(), n in 3usize..200) {
        for s in [solve_fdm(&p, n).unwrap(), solve_analytic(&p, n).unwrap()] {
            prop_assert_eq!(s.values[0], p.y0);
            prop_assert_eq!(s.values[n - 1], p.y1);
            prop_assert_eq!(s.nodes[0], p.x0);
            prop_assert_eq!(s.nodes[n - 1], p.x1);
        }
    }

    #[test]
    fn solution_is_linear_in_the_data(p in problem(), c in -4.0f64..4.0, n in 3usize..150) {
        let scaled = PoissonProblem { g: c * p.g, y0: c * p.y0, y1: c * p.y1, ..p };
        let base = solve_fdm(&p, n).unwrap();
        let s = solve_fdm(&scaled, n).unwrap();
        for (a, b) in s.values.iter().zip(&base.values) {
            prop_assert!((a - c * b).abs() < 1e-10);
        }
    }

    #[test]
    fn repeated_solves_are_bit_identical(p in problem(), n in 3usize..100) {
        prop_assert_eq!(solve_fdm(&p, n).unwrap(), solve_fdm(&p, n).unwrap());
    }
}

use pdelab_core::regress::{
    fit_least_squares, generate_synthetic, normal_residual, LinearModel, RegressionDataset,
    SyntheticSpec,
};
use proptest::prelude::*;

fn spec() -> impl Strategy<Value = SyntheticSpec> {
    (
        2usize..200,
        -5.0f64..5.0,
        -5.0f64..5.0,
        0.0f64..3.0,
        any::<u64>(),
    )
        .prop_map(|(n, w, b, amp, seed)| SyntheticSpec {
            n,
            true_w: w,
            true_b: b,
            x_range: [-4.0, 4.0],
            noise_amplitude: amp,
            seed,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn residual_is_orthogonal_to_design(s in spec()) {
        let d = generate_synthetic(&s).unwrap();
        let m = fit_least_squares(&d).unwrap();
        let r = normal_residual(&d, &m);
        prop_assert!(r[0].abs() < 1e-8 && r[1].abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn fit_beats_nearby_parameters(s in spec(), dirs in prop::collection::vec(0.0f64..std::f64::consts::TAU, 100)) {
        let d = generate_synthetic(&s).unwrap();
        let m = fit_least_squares(&d).unwrap();
        let best = m.sse(&d);
        for theta in dirs {
            let moved = LinearModel { w: m.w + 1e-3 * theta.cos(), b: m.b + 1e-3 * theta.sin() };
            prop_assert!(best <= moved.sse(&d));
        }
    }

    #[test]
    fn noiseless_recovery(s in spec()) {
        let d = generate_synthetic(&SyntheticSpec { noise_amplitude: 0.0, ..s }).unwrap();
        let m = fit_least_squares(&d).unwrap();
        prop_assert!((m.w - s.true_w).abs() < 1e-10 && (m.b - s.true_b).abs() < 1e-10, "{m:?}");
    }

    #[test]
    fn shifting_targets_shifts_intercept(s in spec(), c in -10.0f64..10.0) {
        let d = generate_synthetic(&s).unwrap();
        let m = fit_least_squares(&d).unwrap();
        let shifted = fit_least_squares(&d.shifted(c)).unwrap();
        prop_assert!((shifted.w - m.w).abs() < 1e-10);
        prop_assert!((shifted.b - (m.b + c)).abs() < 1e-10);
    }
}

#[test]
fn single_point_dataset_rejected() {
    assert!(RegressionDataset::from_pairs(vec![0.0], vec![1.0]).is_err());
}

use pdelab_core::ann::{
    check_gradients, gradients, loss_sse, train_steepest_descent, InitScheme, LayerSpec, MlpModel,
    Samples, StopReason, TrainConfig, Transfer,
};
use pdelab_core::linalg::DenseMatrix;
use pdelab_core::regress::{fit_least_squares, generate_synthetic, SyntheticSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn random_samples(n_in: usize, n_out: usize, n: usize, seed: u64) -> Samples {
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let inputs = DenseMatrix::from_fn(n, n_in, |_, _| r.gen_range(-2.0..2.0));
    let targets = DenseMatrix::from_fn(n, n_out, |_, _| r.gen_range(-1.0..1.0));
    Samples::new(inputs, targets).unwrap()
}

fn architecture() -> impl Strategy<Value = (usize, Vec<LayerSpec>)> {
    let transfer = prop_oneof![Just(Transfer::Purelin), Just(Transfer::Tanh)];
    (
        1usize..=5,
        prop::collection::vec((1usize..=5, transfer), 1..=3),
    )
        .prop_map(|(n_in, layers)| {
            (
                n_in,
                layers
                    .into_iter()
                    .map(|(size, transfer)| LayerSpec { size, transfer })
                    .collect(),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn backprop_matches_finite_differences((n_in, layers) in architecture(), seed in any::<u64>()) {
        let m = MlpModel::initialize(n_in, &layers, &InitScheme::Uniform, seed).unwrap();
        let data = random_samples(n_in, m.n_outputs(), 6, seed ^ 0x5555);
        let err = check_gradients(&m, &data, 1e-6).unwrap();
        prop_assert!(err < 1e-6, "sizes {:?}: {err}", m.layer_sizes());
    }

    #[test]
    fn loss_is_the_sum_of_squared_residuals((n_in, layers) in architecture(), seed in any::<u64>()) {
        let m = MlpModel::initialize(n_in, &layers, &InitScheme::Uniform, seed).unwrap();
        let data = random_samples(n_in, m.n_outputs(), 5, seed.wrapping_add(1));
        let mut brute = 0.0;
        for i in 0..data.len() {
            let out = m.forward(data.inputs.row(i)).unwrap();
            for (o, t) in out.iter().zip(data.targets.row(i)) {
                brute += (t - o) * (t - o);
            }
        }
        let l = loss_sse(&m, &data).unwrap();
        prop_assert!((l - brute).abs() <= 1e-12 * brute.max(1.0));
    }

    #[test]
    fn purelin_neuron_gradient_check(w in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
        let data = random_samples(1, 1, 10, seed);
        let err = check_gradients(&MlpModel::siso(w, b, Transfer::Purelin), &data, 1e-3).unwrap();
        prop_assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn descent_is_monotone_below_stability_limit(seed in any::<u64>()) {
        let d = generate_synthetic(&SyntheticSpec::classic(seed)).unwrap();
        let cfg = TrainConfig { stop_tolerance: 1e-12, max_epochs: 300, ..TrainConfig::classic_siso() };
        let (_, r) = train_steepest_descent(&MlpModel::siso(1.0, -1.0, Transfer::Purelin), &Samples::from(&d), &cfg).unwrap();
        for w in r.loss_history.windows(2) {
            prop_assert!(w[1] <= w[0], "loss went up: {} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn training_is_deterministic() {
    let layers = [
        LayerSpec {
            size: 4,
            transfer: Transfer::Tanh,
        },
        LayerSpec {
            size: 2,
            transfer: Transfer::Purelin,
        },
    ];
    let data = random_samples(3, 2, 20, 8);
    let cfg = TrainConfig {
        learning_rate: 0.01,
        stop_tolerance: 1e-9,
        max_epochs: 200,
        init_seed: 4,
        init_scheme: InitScheme::Uniform,
    };
    let run = || {
        let m = MlpModel::initialize(3, &layers, &cfg.init_scheme, cfg.init_seed).unwrap();
        train_steepest_descent(&m, &data, &cfg).unwrap()
    };
    let ((ma, ra), (mb, rb)) = (run(), run());
    assert_eq!(ma, mb);
    assert_eq!(ra.loss_history, rb.loss_history);
    assert_eq!(ra.epochs_run, rb.epochs_run);
    assert_eq!(ra.stop_reason, rb.stop_reason);
}

#[test]
fn classic_descent_reaches_the_pseudoinverse_solution() {
    let d = generate_synthetic(&SyntheticSpec::classic(2)).unwrap();
    let lm = fit_least_squares(&d).unwrap();
    let (m, r) = train_steepest_descent(
        &MlpModel::siso(1.0, -1.0, Transfer::Purelin),
        &Samples::from(&d),
        &TrainConfig::classic_siso(),
    )
    .unwrap();
    assert_eq!(r.stop_reason, StopReason::Converged);
    let p = m.params();
    assert!(
        (p[0] - lm.w).abs() < 1e-2 && (p[1] - lm.b).abs() < 1e-2,
        "{p:?} vs {lm:?}"
    );
    let last = r.loss_history.len() - 1;
    assert!((r.loss_history[last] - r.loss_history[last - 1]).abs() < 1e-6);
}

#[test]
fn gradients_reject_mismatched_data() {
    let data = random_samples(2, 1, 4, 1);
    assert!(gradients(&MlpModel::siso(1.0, 0.0, Transfer::Purelin), &data).is_err());
}

#[test]
fn model_json_round_trip() {
    let layers = [
        LayerSpec {
            size: 3,
            transfer: Transfer::Tanh,
        },
        LayerSpec {
            size: 1,
            transfer: Transfer::Purelin,
        },
    ];
    let m = MlpModel::initialize(2, &layers, &InitScheme::Uniform, 11).unwrap();
    let json = serde_json::to_value(&m).unwrap();
    assert_eq!(json["layer_sizes"], serde_json::json!([2, 3, 1]));
    assert_eq!(json["transfers"], serde_json::json!(["tanh", "purelin"]));
    assert_eq!(json["weights"][0].as_array().unwrap().len(), 3);
    let back: MlpModel = serde_json::from_value(json.clone()).unwrap();
    assert_eq!(back, m);

    let mut bad = json;
    bad["layer_sizes"] = serde_json::json!([2, 4, 1]);
    assert!(serde_json::from_value::<MlpModel>(bad).is_err());
}

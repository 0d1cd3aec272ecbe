use std::time::Duration;

use pdelab_core::costs::{break_even, measure, total_time, BreakEven, CostLedger, LedgerDraft};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const SCAN_LIMIT: u64 = 10_000_000;

/// Linear scan for the first N where the surrogate is strictly cheaper.
fn brute_force(l: &CostLedger) -> BreakEven {
    for n in 1..=SCAN_LIMIT {
        let surrogate = l.t_dg + l.t_nt + n as f64 * l.t_pr;
        if surrogate < n as f64 * l.t_solve {
            return BreakEven::At(n);
        }
    }
    BreakEven::Never
}

fn random_ledger(r: &mut impl Rng) -> CostLedger {
    loop {
        let t_dg = if r.gen_bool(0.1) {
            0.0
        } else {
            r.gen_range(0.0..1000.0)
        };
        let t_nt = if r.gen_bool(0.1) {
            0.0
        } else {
            r.gen_range(0.0..500.0)
        };
        let t_solve = r.gen_range(1e-3..10.0);
        let t_pr = if r.gen_bool(0.05) {
            t_solve * r.gen_range(1.0..2.0)
        } else {
            t_solve * r.gen_range(0.0..0.999)
        };
        let l = CostLedger::from_times(t_dg, t_nt, t_pr, t_solve, 0);
        // Keep answers inside the scan window.
        if t_pr >= t_solve || (t_dg + t_nt) / (t_solve - t_pr) < 1e6 {
            return l;
        }
    }
}

#[test]
fn closed_form_agrees_with_scan_on_random_ledgers() {
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut never = 0;
    for _ in 0..1000 {
        let l = random_ledger(&mut r);
        let expected = brute_force(&l);
        never += usize::from(expected == BreakEven::Never);
        assert_eq!(break_even(&l).unwrap(), expected, "{l:?}");
    }
    assert!(never > 0 && never < 1000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn monotone_in_setup_and_solve_time(
        t_dg in 0.0f64..1000.0,
        t_nt in 0.0f64..1000.0,
        t_pr in 0.0f64..1.0,
        t_solve in 1.0f64..10.0,
        bump in 0.0f64..100.0,
    ) {
        let at = |l: &CostLedger| match break_even(l).unwrap() {
            BreakEven::At(n) => n,
            BreakEven::Never => u64::MAX,
        };
        let base = CostLedger::from_times(t_dg, t_nt, t_pr, t_solve, 0);
        let more_dg = CostLedger::from_times(t_dg + bump, t_nt, t_pr, t_solve, 0);
        let more_nt = CostLedger::from_times(t_dg, t_nt + bump, t_pr, t_solve, 0);
        let faster_solve = CostLedger::from_times(t_dg, t_nt, t_pr, t_solve + bump, 0);
        prop_assert!(at(&more_dg) >= at(&base));
        prop_assert!(at(&more_nt) >= at(&base));
        prop_assert!(at(&faster_solve) <= at(&base));
    }

    #[test]
    fn total_time_steps_by_prediction_time(
        t_dg in 0.0f64..1e4,
        t_nt in 0.0f64..1e4,
        t_pr in 0.0f64..10.0,
        n in 0u64..1_000_000,
    ) {
        let l = CostLedger::from_times(t_dg, t_nt, t_pr, 1.0, n);
        let next = CostLedger { n_predictions: n + 1, ..l.clone() };
        let step = total_time(&next) - total_time(&l);
        // Exact in real arithmetic; in floating point the step is t_pr up to
        // one rounding of the total.
        prop_assert!((step - t_pr).abs() <= 4.0 * f64::EPSILON * total_time(&next).max(1.0));
    }
}

#[test]
fn total_time_exact_increment_on_representable_values() {
    let l = CostLedger::from_times(1000.0, 500.0, 0.125, 10.0, 100);
    let next = CostLedger {
        n_predictions: 101,
        ..l.clone()
    };
    assert_eq!(total_time(&next) - total_time(&l), 0.125);
}

/// Two measurements of the same sleep-bound workload agree within the
/// declared jitter bound.
#[test]
fn repeated_measurements_agree() {
    const JITTER_BOUND_SECS: f64 = 0.010;
    let draft = LedgerDraft {
        t_dg: 0.0,
        t_nt: 0.0,
        n_predictions: 1,
    };
    let sleep = |ms| move || std::thread::sleep(Duration::from_millis(ms));
    let a = measure(draft, 5, sleep(2), sleep(4)).unwrap();
    let b = measure(draft, 5, sleep(2), sleep(4)).unwrap();
    assert!((a.t_pr - b.t_pr).abs() < JITTER_BOUND_SECS, "{a:?} {b:?}");
    assert!(
        (a.t_solve - b.t_solve).abs() < JITTER_BOUND_SECS,
        "{a:?} {b:?}"
    );
    assert!(a.t_solve >= 0.004 && a.t_pr >= 0.002);
}

#[test]
fn ledger_json_uses_never_string() {
    assert_eq!(
        serde_json::to_string(&BreakEven::Never).unwrap(),
        "\"never\""
    );
    assert_eq!(serde_json::to_string(&BreakEven::At(152)).unwrap(), "152");
    let back: BreakEven = serde_json::from_str("\"never\"").unwrap();
    assert_eq!(back, BreakEven::Never);
    assert!(serde_json::from_str::<BreakEven>("\"soon\"").is_err());
}

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use poincare::cancellation::{cancellation_verify, d_tilde, delta_max_of, GAP_TOLERANCE};
use poincare::grid::GridSpec;
use poincare::random::random_decomposition;

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn gap_stays_within_bound(
        seed in any::<u64>(),
        deltas in prop::collection::vec(-0.6f64..0.6, 1..10),
        g_scale in prop_oneof![Just(0.0), 0.01f64..0.4],
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_decomposition(&mut rng, &deltas, g_scale).unwrap();
        let grid = GridSpec::with_points(1024);
        let r = cancellation_verify(&d, &grid).unwrap();
        prop_assert!(r.pass && r.gap <= r.bound + GAP_TOLERANCE, "{r:?}");
        prop_assert!(r.reduced_pass && r.reduction_pass, "{r:?}");
        prop_assert!(r.reduction_residual <= r.d_tilde + GAP_TOLERANCE);
        prop_assert!(d.translation_defect(&grid) <= 1e-9);
        if g_scale == 0.0 {
            prop_assert!(d_tilde(&d, &grid) <= 1e-12);
        }
    }

    #[test]
    fn inserting_a_cancelling_pair_keeps_delta(
        deltas in prop::collection::vec(-1.0f64..1.0, 1..20),
        at in any::<prop::sample::Index>(),
        t in 0.0f64..1.0,
    ) {
        let before = delta_max_of(&deltas);
        let i = at.index(deltas.len() + 1);
        let prefix: f64 = deltas[..i].iter().sum();
        // a pair (s, -s) keeps every partial sum inside [-Delta, Delta]
        let s = -before - prefix + t * 2.0 * before;
        let mut longer = deltas.clone();
        longer.splice(i..i, [s, -s]);
        let after = delta_max_of(&longer);
        prop_assert!(after <= before + 1e-12, "{before} {after}");
    }

    #[test]
    fn delta_is_the_largest_partial_sum(deltas in prop::collection::vec(-1.0f64..1.0, 1..30)) {
        let mut sum = 0.0f64;
        let mut best = 0.0f64;
        for d in &deltas {
            sum += d;
            best = best.max(sum.abs());
        }
        prop_assert!((delta_max_of(&deltas) - best).abs() <= 1e-12);
        prop_assert!(delta_max_of(&deltas) <= deltas.iter().map(|d| d.abs()).sum::<f64>() + 1e-12);
    }
}

mod common;

use proptest::prelude::*;

proptest! {
    #[test]
    fn cv_partition_is_an_exact_cover((n, k, seed) in (2usize..300).prop_flat_map(|n| (Just(n), 2..=n.min(25), any::<u64>()))) {
        common::cv_exact_cover(n, k, seed)?;
    }

    #[test]
    fn cv_never_predicts_a_training_row((seed, n, k) in (any::<u64>(), 4usize..80).prop_flat_map(|(s, n)| (Just(s), Just(n), 2..=n.min(10)))) {
        common::cv_no_leakage(seed, n, k)?;
    }

    #[test]
    fn edp_bins_add_up_to_global(seed in any::<u64>(), n in 1usize..150, classes in 2usize..5) {
        common::edp_aggregation(seed, n, classes)?;
    }

    #[test]
    fn distribution_proportions_sum_to_one((k, codes) in common::outcome_pairs(12)) {
        common::distribution_normalization(&codes, k)?;
    }

    #[test]
    fn rendering_is_deterministic(seed in any::<u64>(), n in 1usize..100) {
        common::rendering_determinism(seed, n)?;
    }

    #[test]
    fn mining_is_deterministic_and_honours_its_contract(seed in any::<u64>()) {
        common::mining_determinism(seed)?;
    }

    #[test]
    fn chi2_statistic_matches_direct_sum(
        cells in prop::collection::vec((1u64..50, 1u32..100), 2..12),
    ) {
        let total: u32 = cells.iter().map(|c| c.1).sum();
        let props: Vec<f64> = cells.iter().map(|c| f64::from(c.1) / f64::from(total)).collect();
        let observed: Vec<u64> = cells.iter().map(|c| c.0).collect();
        let r = devperf::rules::chi2_gof(&observed, &props, None).unwrap();
        let n: u64 = observed.iter().sum();
        let direct: f64 = observed.iter().zip(&props)
            .map(|(&o, &p)| { let e = n as f64 * p; (o as f64 - e).powi(2) / e })
            .sum();
        prop_assert!((r.statistic - direct).abs() <= 1e-12 * direct.max(1.0));
        prop_assert!(r.p_value >= 0.0 && r.p_value <= 1.0);
        prop_assert_eq!(r.df, cells.len() - 1);
    }
}

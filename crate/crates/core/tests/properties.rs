//! Property tests for the cross-cutting invariants.

use proptest::prelude::*;

use heavytail::concentration;
use heavytail::distributions::DistributionSpec;
use heavytail::ingest::{self, ProcurementRecord, Sample, SampleKind};
use heavytail::tailfit;

fn sample(values: Vec<f64>) -> Sample {
    Sample::new(values, SampleKind::Revenues, "x").unwrap()
}

fn positive_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3..1e9f64, 2..max_len)
}

fn records_strategy() -> impl Strategy<Value = Vec<ProcurementRecord>> {
    // Integer prices keep every partial sum exact, so permutation invariance
    // and money conservation hold bit for bit.
    prop::collection::vec(
        (0u8..12, 0u8..20, 1u32..2_000_000, 1u32..40),
        1..60,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (a, w, price, bidders))| ProcurementRecord {
                tender_id: format!("t{i}"),
                authority_id: format!("A{a}"),
                winner_id: format!("W{w}"),
                price: price as f64,
                n_bidders: bidders,
                date: None,
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn standardize_preserves_ratios(values in positive_values(50)) {
        let s = sample(values.clone());
        prop_assume!(s.std_dev() > 0.0);
        let (standardized, scale) = ingest::standardize(&s).unwrap();
        prop_assert!(scale > 0.0);
        for (i, a) in values.iter().enumerate() {
            for (j, b) in values.iter().enumerate() {
                let before = a / b;
                let after = standardized.values()[i] / standardized.values()[j];
                prop_assert!(((before - after) / before).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn aggregate_is_permutation_invariant(records in records_strategy(), seed in 0u64..1000) {
        let base = ingest::aggregate(&records, 0.0).unwrap();

        // Deterministic shuffle of the record order.
        let mut shuffled = records.clone();
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let other = ingest::aggregate(&shuffled, 0.0).unwrap();

        prop_assert_eq!(base.revenues.values(), other.revenues.values());
        prop_assert_eq!(base.spendings.values(), other.spendings.values());
        prop_assert_eq!(&base.summary, &other.summary);
    }

    #[test]
    fn money_is_conserved_across_aggregations(records in records_strategy()) {
        let agg = ingest::aggregate(&records, 0.0).unwrap();
        // Integer prices: the two groupings must agree exactly.
        prop_assert_eq!(agg.revenues.sum(), agg.summary.total_money);
        prop_assert_eq!(agg.spendings.sum(), agg.summary.total_money);
    }

    #[test]
    fn tail_function_decreases_from_one(
        alpha in 0.3..4.0f64,
        beta in 0.05..3.0f64,
        q in 1.05..1.9f64,
        x_min in 0.1..10.0f64,
        steps in 1usize..200,
    ) {
        let specs = [
            DistributionSpec::pareto(alpha, x_min).unwrap(),
            DistributionSpec::exponential(beta, x_min).unwrap(),
            DistributionSpec::q_exponential(q, 1.0, x_min).unwrap(),
        ];
        for spec in specs {
            prop_assert!((spec.tail_function(x_min).unwrap() - 1.0).abs() < 1e-14);
            let mut prev = 1.0;
            for i in 1..=steps {
                let x = x_min + i as f64 * 0.37;
                let t = spec.tail_function(x).unwrap();
                prop_assert!(t <= prev + 1e-15);
                prop_assert!(spec.density(x).unwrap() >= 0.0);
                prev = t;
            }
        }
    }

    #[test]
    fn quantile_is_the_inverse_of_the_tail(
        alpha in 0.3..4.0f64,
        q in 1.05..1.9f64,
        u in 1e-9..1.0f64,
    ) {
        let specs = [
            DistributionSpec::pareto(alpha, 1.0).unwrap(),
            DistributionSpec::exponential(alpha, 0.5).unwrap(),
            DistributionSpec::q_exponential(q, 2.0, 1.0).unwrap(),
        ];
        for spec in specs {
            let x = spec.quantile_tail(u).unwrap();
            let back = spec.tail_function(x).unwrap();
            prop_assert!(((back - u) / u).abs() < 1e-10, "{back} vs {u}");
        }
    }

    #[test]
    fn hill_estimate_is_scale_equivariant(
        values in prop::collection::vec(1.0..1e6f64, 10..200),
        scale in prop::sample::select(vec![0.25f64, 0.5, 2.0, 4.0, 1024.0]),
    ) {
        let tail = tailfit::select_tail(&sample(values.clone()), 1.0).unwrap();
        prop_assume!(tailfit::fit_power_mle(&tail).is_ok());
        let alpha = tailfit::fit_power_mle(&tail).unwrap().exponent;

        let scaled_values: Vec<f64> = values.iter().map(|v| v * scale).collect();
        let scaled_tail = tailfit::select_tail(&sample(scaled_values), scale).unwrap();
        let scaled_alpha = tailfit::fit_power_mle(&scaled_tail).unwrap().exponent;
        // Power-of-two scaling keeps every ratio x/cutoff bit-identical.
        prop_assert_eq!(alpha, scaled_alpha);
    }

    #[test]
    fn top_share_is_monotone_and_dominates_fraction(values in positive_values(120)) {
        let s = sample(values);
        let mut prev = 0.0;
        for i in 1..=25 {
            let f = i as f64 / 25.0;
            let share = concentration::top_share(&s, f).unwrap();
            prop_assert!(share >= prev - 1e-12);
            prop_assert!(share + 1e-12 >= f);
            prev = share;
        }
    }

    #[test]
    fn lorenz_curve_is_valid(values in positive_values(120)) {
        let curve = concentration::lorenz(&sample(values)).unwrap();
        prop_assert!(curve.gini >= 0.0 && curve.gini <= 1.0);
        prop_assert_eq!(curve.points[0], (0.0, 0.0));
        prop_assert_eq!(*curve.points.last().unwrap(), (1.0, 1.0));
        for w in curve.points.windows(2) {
            prop_assert!(w[1].1 >= w[0].1 - 1e-12);
            prop_assert!(w[1].1 <= w[1].0 + 1e-12);
        }
        for w in curve.points.windows(3) {
            prop_assert!((w[2].1 - w[1].1) - (w[1].1 - w[0].1) >= -1e-12);
        }
    }
}

use fuzzy_bandit::experiment::ExperimentConfig;
use fuzzy_bandit::policy::{epsilon_greedy_policy, fuzzy_policy, softmax_policy};
use fuzzy_bandit::report::{config_to_json, parse_config};
use fuzzy_bandit::{
    build_rule_base, ActionValues, BoundsMode, PolicyDistribution, PolicySpec,
    SampleAverageEstimator,
};
use proptest::prelude::*;

fn values(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| prop::collection::vec(-5.0f64..5.0, n))
}

fn policy_spec() -> impl Strategy<Value = PolicySpec> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(PolicySpec::fuzzy),
        (0.01f64..10.0).prop_map(PolicySpec::softmax),
        (0.0f64..=1.0).prop_map(PolicySpec::epsilon_greedy),
        Just(PolicySpec::Greedy),
        Just(PolicySpec::Uniform),
    ]
}

fn assert_close(a: &PolicyDistribution, b: &PolicyDistribution, tol: f64) {
    for (x, y) in a.probs().iter().zip(b.probs()) {
        assert!((x - y).abs() <= tol, "{:?} vs {:?}", a.probs(), b.probs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn policies_satisfy_axioms(q in values(2..=20), spec in policy_spec()) {
        let d = spec.distribution(&ActionValues::new(q.clone()).unwrap()).unwrap();
        let p = d.probs();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for a in 0..q.len() {
            for b in 0..q.len() {
                if q[a] >= q[b] {
                    prop_assert!(p[a] >= p[b] - 1e-12);
                }
            }
        }
    }

    #[test]
    fn policies_are_permutation_equivariant(
        q in values(2..=12),
        spec in policy_spec(),
        seed in any::<u64>(),
    ) {
        let n = q.len();
        let mut perm: Vec<usize> = (0..n).collect();
        // Fisher-Yates driven by a splitmix stream
        let mut s = seed;
        for i in (1..n).rev() {
            s = fuzzy_bandit::seed::splitmix64(s);
            perm.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let permuted: Vec<f64> = perm.iter().map(|&i| q[i]).collect();
        let d = spec.distribution(&ActionValues::new(q).unwrap()).unwrap();
        let dp = spec.distribution(&ActionValues::new(permuted).unwrap()).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((dp.probs()[k] - d.probs()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn fuzzy_affine_invariance(
        q in values(2..=15),
        xi in 0.0f64..=1.0,
        scale in 0.01f64..100.0,
        shift in -100.0f64..100.0,
    ) {
        let moved: Vec<f64> = q.iter().map(|v| scale * v + shift).collect();
        let a = fuzzy_policy(&ActionValues::new(q).unwrap(), xi, BoundsMode::Adaptive).unwrap();
        let b = fuzzy_policy(&ActionValues::new(moved).unwrap(), xi, BoundsMode::Adaptive).unwrap();
        assert_close(&a, &b, 1e-10);
    }

    #[test]
    fn fuzzy_output_scale_invariance(q in values(2..=15), xi in 0.0f64..=1.0, c in 0.01f64..100.0) {
        let (lo, hi) = q.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        prop_assume!(hi > lo);
        let rb = build_rule_base(q.len(), lo, hi, xi).unwrap();
        let scaled_centers = rb.output_centers().iter().map(|o| o * c).collect();
        let scaled = rb.clone().with_output_centers(scaled_centers).unwrap();
        let t: Vec<f64> = q.iter().map(|&v| rb.infer(v).unwrap()).collect();
        let ts: Vec<f64> = q.iter().map(|&v| scaled.infer(v).unwrap()).collect();
        let a = fuzzy_bandit::normalize(&t).unwrap();
        let b = fuzzy_bandit::normalize(&ts).unwrap();
        assert_close(&a, &b, 1e-12);
    }

    #[test]
    fn fuzzy_plateau_where_gaussian_branch_wins(
        q in values(2..=15),
        xi in prop_oneof![0.5f64..=0.6, 0.998f64..=1.0],
    ) {
        let v = ActionValues::new(q).unwrap();
        let a = fuzzy_policy(&v, 0.5, BoundsMode::Adaptive).unwrap();
        let b = fuzzy_policy(&v, xi, BoundsMode::Adaptive).unwrap();
        assert_close(&a, &b, 1e-12);
    }

    #[test]
    fn infer_scaling_and_constancy(
        n in 2usize..=30,
        q in -3.0f64..3.0,
        c in 0.01f64..100.0,
        xi in 0.0f64..=1.0,
    ) {
        let rb = build_rule_base(n, -1.0, 1.0, xi).unwrap();
        let base = rb.infer(q).unwrap();
        let scaled = rb.clone()
            .with_output_centers(rb.output_centers().iter().map(|o| o * c).collect())
            .unwrap();
        let s = scaled.infer(q).unwrap();
        prop_assert!((s - c * base).abs() <= 1e-12 * (c * base).abs().max(1e-300));
        let flat = rb.clone().with_output_centers(vec![c; n]).unwrap();
        prop_assert!((flat.infer(q).unwrap() - c).abs() <= 1e-12 * c);
        let o = rb.output_centers();
        prop_assert!(base >= o[0] - 1e-12 && base <= o[n - 1] + 1e-12);
    }

    #[test]
    fn rule_base_invariants(n in 2usize..=200, lo in -50.0f64..50.0, width in 1e-3f64..100.0, xi in 0.0f64..=1.0) {
        let hi = lo + width;
        let rb = build_rule_base(n, lo, hi, xi).unwrap();
        let inputs = rb.input_centers();
        prop_assert_eq!(inputs[0], lo);
        prop_assert_eq!(inputs[n - 1], hi);
        let gap = (hi - lo) / (n - 1) as f64;
        for w in inputs.windows(2) {
            prop_assert!(((w[1] - w[0]) - gap).abs() <= 1e-12 * gap.max(1.0) * (1.0 + lo.abs().max(hi.abs())));
        }
        prop_assert_eq!(rb.sigma_x(), (hi - lo) / (3 * n - 1) as f64);
        prop_assert_eq!(rb.sigma_y(), 1.0 / (2 * n - 1) as f64);
        let o = rb.output_centers();
        prop_assert_eq!(o[0], 0.0);
        prop_assert!(o.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(o.iter().all(|&c| (0.0..=1.0).contains(&c)));
    }

    #[test]
    fn softmax_exact_shift_invariance(
        raw in prop::collection::vec(-4096i32..4096, 1..12),
        shift in -1000i32..1000,
        tau in prop_oneof![Just(0.1), Just(0.5), Just(1.0), Just(2.0)],
    ) {
        // dyadic entries so that adding an integer shift is exact
        let q: Vec<f64> = raw.iter().map(|&r| r as f64 / 1024.0).collect();
        let moved: Vec<f64> = q.iter().map(|v| v + shift as f64).collect();
        let a = softmax_policy(&ActionValues::new(q).unwrap(), tau).unwrap();
        let b = softmax_policy(&ActionValues::new(moved).unwrap(), tau).unwrap();
        prop_assert_eq!(a.probs(), b.probs());
    }

    #[test]
    fn epsilon_greedy_mass_split(q in values(1..=10), eps in 0.0f64..=1.0) {
        let d = epsilon_greedy_policy(&ActionValues::new(q.clone()).unwrap(), eps).unwrap();
        let hi = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let g = q.iter().filter(|&&v| v == hi).count() as f64;
        let n = q.len() as f64;
        for (p, v) in d.probs().iter().zip(&q) {
            let expected = eps / n + if *v == hi { (1.0 - eps) / g } else { 0.0 };
            prop_assert!((p - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn estimator_matches_batch_mean(rewards in prop::collection::vec((0usize..4, -1000.0f64..1000.0), 0..2000)) {
        let mut est = SampleAverageEstimator::new(4).unwrap();
        let mut sums = [0.0f64; 4];
        let mut counts = [0u64; 4];
        for &(a, r) in &rewards {
            est.update(a, r).unwrap();
            sums[a] += r;
            counts[a] += 1;
        }
        for a in 0..4 {
            if counts[a] == 0 {
                prop_assert_eq!(est.means()[a], 0.0);
            } else {
                prop_assert!((est.means()[a] - sums[a] / counts[a] as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn estimator_order_independent(mut rewards in prop::collection::vec(-1000.0f64..1000.0, 1..500), seed in any::<u64>()) {
        let mut est = SampleAverageEstimator::new(1).unwrap();
        for &r in &rewards {
            est.update(0, r).unwrap();
        }
        let first = est.means()[0];
        let mut s = seed;
        for i in (1..rewards.len()).rev() {
            s = fuzzy_bandit::seed::splitmix64(s);
            rewards.swap(i, (s % (i as u64 + 1)) as usize);
        }
        est.reset();
        for &r in &rewards {
            est.update(0, r).unwrap();
        }
        prop_assert!((est.means()[0] - first).abs() < 1e-10);
    }
}

fn config_strategy() -> impl Strategy<Value = ExperimentConfig> {
    let bounds = prop_oneof![
        Just(BoundsMode::Adaptive),
        (-10.0f64..0.0, 0.1f64..10.0).prop_map(|(alpha, w)| BoundsMode::Fixed { alpha, beta: alpha + w }),
    ];
    let fuzzy = (0.0f64..=1.0, bounds).prop_map(|(xi, bounds)| PolicySpec::Fuzzy { xi, bounds });
    let spec = prop_oneof![fuzzy, policy_spec()];
    (2usize..100, 1usize..5000, 1usize..5000, any::<u64>(), prop::collection::vec(spec, 1..6)).prop_map(
        |(n_arms, runs, plays, base_seed, policies)| ExperimentConfig {
            n_arms,
            runs,
            plays,
            base_seed,
            policies,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn config_round_trips(config in config_strategy()) {
        prop_assert_eq!(parse_config(&config_to_json(&config)).unwrap(), config);
    }
}

#[test]
fn plateau_breaks_on_the_linear_branch() {
    // For xi in (~0.6004, ~0.9976) the top output center is 1 - xi and the
    // policy differs from the xi = 0.5 policy.
    let v = ActionValues::new(vec![0.0, 0.4, 0.8, 0.9, 1.0]).unwrap();
    let half = fuzzy_policy(&v, 0.5, BoundsMode::Adaptive).unwrap();
    let off = fuzzy_policy(&v, 0.75, BoundsMode::Adaptive).unwrap();
    let gap = half
        .probs()
        .iter()
        .zip(off.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(gap > 1e-3, "{gap}");
}

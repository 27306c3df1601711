//! End-to-end properties of trained prophet policies.

use proptest::prelude::*;
use sampled_prophet_core::generate::random_matroid;
use sampled_prophet_core::prophet::{run_online, train};
use sampled_prophet_core::thresholds::tau_vector;
use sampled_prophet_core::values::sample_values;
use sampled_prophet_core::{
    Instance, MatroidExt, ProphetPolicy, Streams, ThresholdTable, TieBroken, TrainConfig, ValueDistribution,
};

fn small_policy(seed: u64, n: usize) -> (Instance, ProphetPolicy) {
    let m = random_matroid(&mut Streams::new(seed).rng(0), n);
    let inst = Instance::new(m, vec![ValueDistribution::Exponential { rate: 1.0 }; n]).unwrap();
    let cfg = TrainConfig::defaults(n, 0.2).unwrap().with_threshold_samples(3000).with_s(2000);
    let policy = train(&inst, &cfg, &Streams::new(seed).child("train")).unwrap();
    (inst, policy)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn online_selection_is_feasible(seed in any::<u64>(), n in 1usize..=8) {
        let (inst, policy) = small_policy(seed, n);
        let order: Vec<usize> = (0..n).collect();
        let streams = Streams::new(seed).child("eval");
        for t in 0..50 {
            let mut rng = streams.rng(t);
            let v = inst.sample_vector(&mut rng);
            let out = run_online(&policy, &inst.matroid, &v, &order, &mut rng).unwrap();
            prop_assert!(out.accepted.is_subset(&out.active));
            prop_assert!(inst.matroid.is_independent(&out.accepted).unwrap());
            let value: f64 = out.accepted.iter().map(|e| v[e].base).sum();
            prop_assert!((value - out.value).abs() < 1e-9);
        }
    }

    #[test]
    fn raising_one_value_only_adds_that_element(seed in any::<u64>(), n in 1usize..=8, e in 0usize..8, bump in 0.0f64..3.0) {
        let e = e % n;
        let (inst, policy) = small_policy(seed, n);
        let order: Vec<usize> = (0..n).rev().collect();
        let streams = Streams::new(seed).child("coupled");
        for t in 0..50 {
            let v = inst.sample_vector(&mut streams.rng(2 * t));
            let mut raised = v.clone();
            raised[e] = TieBroken::new(v[e].base + bump, v[e].tiebreak);
            let low = run_online(&policy, &inst.matroid, &v, &order, &mut streams.rng(2 * t + 1)).unwrap();
            let high = run_online(&policy, &inst.matroid, &raised, &order, &mut streams.rng(2 * t + 1)).unwrap();
            prop_assert!(low.active.without(e) == high.active.without(e));
            prop_assert!(!low.active.contains(e) || high.active.contains(e));
        }
    }

    #[test]
    fn activation_rises_with_value(seed in any::<u64>(), n in 1usize..=8) {
        let (inst, policy) = small_policy(seed, n);
        let table = &policy.table;
        let mut rng = Streams::new(seed).rng(3);
        for i in 0..n {
            let mut vs: Vec<_> = (0..20).map(|_| sample_values(&inst.dists, &mut rng)[i]).collect();
            vs.sort();
            let probs: Vec<f64> = vs.iter().map(|v| table.activation_probability(i, v)).collect();
            prop_assert!(probs.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(probs.iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn exchange_values_are_invariant_under_scaling(seed in any::<u64>(), n in 1usize..=8, scale in 0.1f64..10.0) {
        let m = random_matroid(&mut Streams::new(seed).rng(0), n);
        let dists = vec![ValueDistribution::Uniform { a: 0.0, b: 1.0 }; n];
        let v = sample_values(&dists, &mut Streams::new(seed).rng(1));
        let scaled: Vec<_> = v.iter().map(|x| TieBroken::new(x.base * scale, x.tiebreak)).collect();
        let tau = tau_vector(&m, &v).unwrap();
        let tau_scaled = tau_vector(&m, &scaled).unwrap();
        for i in 0..n {
            // the same element realises the minimum at either scale
            let j = v.iter().position(|x| *x == tau[i]);
            let js = scaled.iter().position(|x| *x == tau_scaled[i]);
            prop_assert_eq!(j, js);
        }
    }
}

#[test]
fn policy_and_table_round_trip() {
    let (_, policy) = small_policy(5, 6);
    let back = ProphetPolicy::from_json(&policy.to_json().unwrap()).unwrap();
    assert_eq!(back, policy);
    let table_json = serde_json::to_string(&policy.table).unwrap();
    assert_eq!(serde_json::from_str::<ThresholdTable>(&table_json).unwrap(), policy.table);
}

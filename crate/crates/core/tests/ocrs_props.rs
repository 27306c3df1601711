//! Property tests for protected-set selection and the chain decomposition.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use sampled_prophet_core::generate::{random_matroid, random_polytope_point};
use sampled_prophet_core::ocrs::{
    decompose_exact, run_layered_greedy, select, select_exact, select_in_order, EmpiricalMeasure, ExactMeasure,
};
use sampled_prophet_core::{ChainDecomposition, ElementSet, MatroidExt, Rational, Streams};

fn dyadic(seed: u64, n: usize) -> Vec<f64> {
    use rand::Rng;
    let mut rng = Streams::new(seed).rng(7);
    (0..n).map(|_| f64::from(rng.random_range(0..=16u32)) / 16.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selection_ignores_processing_order(seed in any::<u64>(), n in 1usize..=8, mask in any::<u64>(), c in 0.3f64..0.9) {
        let m = random_matroid(&mut Streams::new(seed).rng(0), n);
        let measure = ExactMeasure::new(dyadic(seed, n)).unwrap();
        let candidates = ElementSet::from_mask(n, mask & ((1 << n) - 1));
        let batch = select_exact(&m, &measure, &candidates, &c).unwrap();
        prop_assert!(batch.is_subset(&candidates));
        let mut order = candidates.to_vec();
        let mut rng = Streams::new(seed).rng(8);
        for _ in 0..4 {
            order.shuffle(&mut rng);
            prop_assert_eq!(&select_in_order(&m, &measure, &candidates, &c, &order).unwrap(), &batch);
        }
    }

    #[test]
    fn selection_shrinks_as_the_bar_rises(seed in any::<u64>(), n in 1usize..=8, lo in 0.2f64..0.6, gap in 0.0f64..0.3) {
        let m = random_matroid(&mut Streams::new(seed).rng(0), n);
        let measure = ExactMeasure::new(dyadic(seed, n)).unwrap();
        let all = m.ground_set();
        let low = select_exact(&m, &measure, &all, &lo).unwrap();
        let high = select_exact(&m, &measure, &all, &(lo + gap)).unwrap();
        prop_assert!(high.is_subset(&low));
    }

    #[test]
    fn float_and_rational_selection_agree(seed in any::<u64>(), n in 1usize..=7, j in 1u32..16) {
        let m = random_matroid(&mut Streams::new(seed).rng(0), n);
        let x = dyadic(seed, n);
        // an odd 32nd never equals a probability built from 16ths
        let c = f64::from(2 * j + 1) / 32.0;
        let xr: Vec<Rational> = x.iter().map(|&p| Rational::from_float(p).unwrap()).collect();
        let all = m.ground_set();
        let float = select_exact(&m, &ExactMeasure::new(x).unwrap(), &all, &c).unwrap();
        let exact = select_exact(&m, &ExactMeasure::new(xr).unwrap(), &all, &Rational::from_float(c).unwrap()).unwrap();
        prop_assert_eq!(float, exact);
    }

    #[test]
    fn protected_rank_decays(seed in any::<u64>(), n in 1usize..=8, mask in any::<u64>(), c in 0.5f64..0.9) {
        let m = random_matroid(&mut Streams::new(seed).rng(0), n);
        let x = random_polytope_point(&m, &mut Streams::new(seed).rng(1), 3, 0.5);
        let candidates = ElementSet::from_mask(n, mask & ((1 << n) - 1));
        let r = m.rank(&candidates).unwrap();
        prop_assume!(r > 0);
        let chosen = select_exact(&m, &ExactMeasure::new(x).unwrap(), &candidates, &c).unwrap();
        prop_assert!((m.rank(&chosen).unwrap() as f64) < 0.5 / c * r as f64);
    }

    #[test]
    fn decomposition_is_a_strict_chain(seed in any::<u64>(), n in 1usize..=8, c in 0.5f64..0.8) {
        let m = random_matroid(&mut Streams::new(seed).rng(0), n);
        let x = random_polytope_point(&m, &mut Streams::new(seed).rng(1), 3, 0.5);
        let d = decompose_exact(&m, &ExactMeasure::new(x).unwrap(), &c, 64).unwrap();
        prop_assert!(d.is_ok() && d.is_strict_chain());
        prop_assert!(d.rank_decay_holds(&m, 0.5, c));
        let json = serde_json::to_string(&d).unwrap();
        prop_assert_eq!(serde_json::from_str::<ChainDecomposition>(&json).unwrap(), d);
    }

    #[test]
    fn layered_greedy_stays_independent(seed in any::<u64>(), n in 1usize..=8, mask in any::<u64>()) {
        let m = random_matroid(&mut Streams::new(seed).rng(0), n);
        let x = random_polytope_point(&m, &mut Streams::new(seed).rng(1), 3, 0.5);
        let d = decompose_exact(&m, &ExactMeasure::new(x).unwrap(), &0.6, 64).unwrap();
        let active = ElementSet::from_mask(n, mask & ((1 << n) - 1));
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut Streams::new(seed).rng(2));
        let accepted = run_layered_greedy(&m, &d, &active, &order).unwrap();
        prop_assert!(accepted.is_subset(&active));
        prop_assert!(m.is_independent(&accepted).unwrap());
    }
}

#[test]
fn empirical_selection_matches_exact_on_the_full_support() {
    // a histogram holding every atom in proportion is the exact measure
    let m = sampled_prophet_core::matroid::UniformMatroid::new(3, 1).unwrap();
    let samples: Vec<ElementSet> = (0u64..8).map(|mask| ElementSet::from_mask(3, mask)).collect();
    let empirical = EmpiricalMeasure::from_samples(3, &samples).unwrap();
    let exact = ExactMeasure::new(vec![0.5; 3]).unwrap();
    let all = ElementSet::full(3);
    for c in [0.3, 0.5, 0.7, 0.8] {
        assert_eq!(select(&m, &empirical, &all, &c).unwrap(), select_exact(&m, &exact, &all, &c).unwrap());
    }
}

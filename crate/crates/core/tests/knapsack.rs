use orbench_core::knapsack::{
    greedy_solution, okp_offline_oracle, solve_exact_dp, InstanceGenerator, KnapsackEnv, KnapsackInstance,
    KnapsackVariant,
};
use orbench_core::{Action, EnvConfig, Environment, RngStream};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Best value over every count vector, by odometer enumeration.
fn brute_force(inst: &KnapsackInstance) -> f64 {
    let mut counts = vec![0u64; inst.len()];
    let mut best = 0.0f64;
    loop {
        if inst.is_feasible(&counts) {
            best = best.max(inst.selection_value(&counts));
        }
        let mut i = 0;
        loop {
            if i == counts.len() {
                return best;
            }
            if counts[i] < inst.counts[i] {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

fn instance() -> impl Strategy<Value = KnapsackInstance> {
    (1usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(1u32..30, n),
            prop::collection::vec(1u64..20, n),
            prop::collection::vec(1u64..=3, n),
            0u64..60,
        )
            .prop_map(|(v, w, c, cap)| {
                KnapsackInstance::new(v.into_iter().map(f64::from).collect(), w, c, cap).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn dp_matches_enumeration(inst in instance()) {
        let sol = solve_exact_dp(&inst).unwrap();
        prop_assert!(inst.is_feasible(&sol.counts));
        prop_assert_eq!(sol.value, inst.selection_value(&sol.counts));
        prop_assert_eq!(sol.value, brute_force(&inst));
    }

    #[test]
    fn greedy_is_feasible_and_dominated(inst in instance()) {
        let g = greedy_solution(&inst);
        prop_assert!(inst.is_feasible(&g));
        prop_assert!(inst.selection_value(&g) <= solve_exact_dp(&inst).unwrap().value);
    }

    #[test]
    fn offline_oracle_dominates_any_accepted_subset(
        draws in prop::collection::vec((1u32..20, 1u64..15), 0..10),
        accept in prop::collection::vec(any::<bool>(), 10),
        cap in 0u64..40,
    ) {
        let draws: Vec<(f64, u64)> = draws.into_iter().map(|(v, w)| (f64::from(v), w)).collect();
        let oracle = okp_offline_oracle(&draws, cap).unwrap();
        let mut load = 0;
        let mut value = 0.0;
        for (k, &(v, w)) in draws.iter().enumerate() {
            if accept[k] && load + w <= cap {
                load += w;
                value += v;
            }
        }
        prop_assert!(value <= oracle);
    }

    #[test]
    fn offline_mask_marks_exactly_the_fitting_items(seed in any::<u64>(), picks in prop::collection::vec(0usize..12, 20)) {
        let cfg = EnvConfig::new().with_seed(seed).set("items", 12.0).set("capacity", 40.0).set("max_count", 3.0);
        let mut env = KnapsackEnv::from_config(KnapsackVariant::Bounded, &cfg).unwrap();
        let mut obs = env.reset(None).unwrap();
        for p in picks {
            let inst = env.instance().unwrap().clone();
            let st = env.state().unwrap().clone();
            let mask = obs.mask.clone().unwrap();
            for i in 0..inst.len() {
                let fits = st.remaining[i] > 0 && st.load + inst.weights[i] <= inst.capacity;
                prop_assert_eq!(mask[i], fits);
            }
            let r = env.step(&Action::Discrete(p)).unwrap();
            prop_assert!(env.state().unwrap().load <= inst.capacity);
            if r.done {
                break;
            }
            obs = r.observation;
        }
    }
}

#[test]
fn online_draws_follow_configured_probabilities() {
    let probs = [0.1, 0.2, 0.3, 0.4];
    let cfg = EnvConfig::new()
        .with_seed(11)
        .set("items", 4.0)
        .set("capacity", 100.0)
        .set("steps", 50.0)
        .set("probabilities", probs.to_vec());
    let mut env = KnapsackEnv::from_config(KnapsackVariant::Online, &cfg).unwrap();
    let mut observed = [0.0f64; 4];
    for _ in 0..200 {
        env.reset(None).unwrap();
        loop {
            observed[env.state().unwrap().current_item.unwrap()] += 1.0;
            if env.step(&Action::Discrete(0)).unwrap().done {
                break;
            }
        }
    }
    let total: f64 = observed.iter().sum();
    assert_eq!(total, 200.0 * 50.0);
    let stat: f64 = observed.iter().zip(probs).map(|(o, p)| (o - total * p).powi(2) / (total * p)).sum();
    let p_value = 1.0 - ChiSquared::new(3.0).unwrap().cdf(stat);
    assert!(p_value > 1e-3, "chi-square {stat}, p = {p_value}");
}

#[test]
fn generator_respects_its_ranges() {
    let g = InstanceGenerator::bounded();
    let mut rng = RngStream::new(5, "gen");
    for _ in 0..50 {
        let inst = g.generate(&mut rng);
        assert_eq!(inst.len(), g.items);
        assert_eq!(inst.capacity, g.capacity);
        assert!(inst.weights.iter().all(|&w| (1..=g.max_weight).contains(&w)));
        assert!(inst.values.iter().all(|&v| v >= 1.0 && v <= g.max_value as f64));
        assert!(inst.counts.iter().all(|&c| (1..=g.max_count).contains(&c)));
    }
}

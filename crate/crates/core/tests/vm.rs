use orbench_core::vm::{generate_demand, DemandModel, DemandSource, FirstFitPolicy, VmPackingConfig, VmPackingEnv, FIT_TOL};
use orbench_core::{run_episode, Environment, Policy, RandomPolicy, RngStream};
use proptest::prelude::*;

fn churn_config() -> VmPackingConfig {
    VmPackingConfig {
        pm_count: 10,
        demand: DemandSource::Synthetic(DemandModel { cpu_mean: 0.2, mem_mean: 0.15, mean_duration: Some(8.0), ..DemandModel::default() }),
        ..VmPackingConfig::default()
    }
}

#[test]
fn mask_respecting_steps_never_overload() {
    let mut env = VmPackingEnv::new(churn_config(), true, Some(1)).unwrap();
    let mut policy = RandomPolicy::new(env.action_space());
    let mut steps = 0;
    let mut episode = 0u64;
    while steps < 10_000 {
        policy.begin_episode(episode);
        let mut obs = env.reset(Some(episode)).unwrap();
        loop {
            let r = env.step(&policy.act(&obs).unwrap()).unwrap();
            steps += 1;
            assert!(!r.info.contains_key("overload"));
            let c = env.cluster().unwrap();
            assert!(c.cpu.iter().chain(&c.mem).all(|&u| (0.0..=1.0 + FIT_TOL).contains(&u)));
            if r.done {
                break;
            }
            obs = r.observation;
        }
        episode += 1;
    }
}

#[test]
fn beta_demand_has_configured_mean() {
    let m = DemandModel { cpu_mean: 0.05, mem_mean: 0.12, concentration: 20.0, mean_duration: Some(5.0) };
    let reqs = generate_demand(&mut RngStream::new(3, "vm/demand"), &m, 40_000);
    let n = reqs.len() as f64;
    for (mean, got) in [(m.cpu_mean, reqs.iter().map(|r| r.cpu).sum::<f64>() / n), (m.mem_mean, reqs.iter().map(|r| r.mem).sum::<f64>() / n)] {
        let se = (mean * (1.0 - mean) / (m.concentration + 1.0) / n).sqrt();
        assert!((got - mean).abs() < 5.0 * se, "mean {got} vs {mean}");
    }
    let durations: Vec<f64> = reqs.iter().map(|r| r.duration.unwrap() as f64).collect();
    assert!(durations.iter().all(|&d| d >= 1.0));
    let dm = durations.iter().sum::<f64>() / n;
    let se = (20.0f64 / n).sqrt();
    assert!((dm - 5.0).abs() < 5.0 * se, "duration mean {dm}");
}

#[test]
fn first_fit_beats_random_on_paired_episodes() {
    let mut env = VmPackingEnv::new(VmPackingConfig::default(), true, None).unwrap();
    let (mut ff, mut rnd) = (0.0, 0.0);
    for seed in 0..30 {
        ff += run_episode(&mut env, &mut FirstFitPolicy, seed).unwrap().total_reward;
        let mut p = RandomPolicy::new(env.action_space());
        rnd += run_episode(&mut env, &mut p, seed).unwrap().total_reward;
    }
    assert!(ff > rnd, "first fit {ff} vs random {rnd}");
}

proptest! {
    #[test]
    fn loads_return_to_zero_when_everything_departs(seed in any::<u64>()) {
        let cfg = VmPackingConfig {
            steps: 40,
            demand: DemandSource::Synthetic(DemandModel { mean_duration: Some(1.0), ..DemandModel::default() }),
            ..VmPackingConfig::default()
        };
        let mut env = VmPackingEnv::new(cfg, true, None).unwrap();
        let mut policy = FirstFitPolicy;
        let rec = run_episode(&mut env, &mut policy, seed).unwrap();
        prop_assert_eq!(rec.steps(), 40);
        let c = env.cluster().unwrap();
        prop_assert!(c.hosted.iter().all(|&h| h == 0));
        prop_assert!(c.cpu.iter().chain(&c.mem).all(|&u| u == 0.0));
    }
}

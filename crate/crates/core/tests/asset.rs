use orbench_core::asset::{apply_trades, deterministic_plan, simulate_plan, MpaaConfig, MpaaEnv, PortfolioState, TradePlan};
use orbench_core::{Environment, Policy, RandomPolicy};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = MpaaConfig> {
    (1usize..=3, 1usize..=6, -0.1f64..0.25, 0.0f64..0.05, 0.0f64..0.05).prop_map(|(n, l, drift, a, b)| {
        MpaaConfig::synthetic(n, l, &[1.0, 2.5, 4.0], drift, 0.0, a, b)
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn nonnegative(s: &PortfolioState) -> bool {
    s.cash >= 0.0 && s.holdings.iter().all(|&x| x >= 0.0)
}

#[test]
fn random_steps_keep_portfolio_nonnegative() {
    for bound in [2000.0, 40.0] {
        let cfg = MpaaConfig { trade_bound: bound, ..MpaaConfig::default() };
        let mut env = MpaaEnv::new(cfg, Some(3)).unwrap();
        let mut policy = RandomPolicy::new(env.action_space());
        let mut steps = 0;
        for episode in 0..1000u64 {
            policy.begin_episode(episode);
            let mut obs = env.reset(Some(episode)).unwrap();
            loop {
                let r = env.step(&policy.act(&obs).unwrap()).unwrap();
                steps += 1;
                assert!(nonnegative(env.state().unwrap()), "{:?}", env.state());
                assert!(r.observation.values.iter().all(|&v| v >= 0.0));
                if r.done {
                    break;
                }
                obs = r.observation;
            }
        }
        assert_eq!(steps, 10_000);
    }
}

proptest! {
    #[test]
    fn trading_at_fixed_prices_never_creates_wealth(
        prices in prop::collection::vec(0.5f64..5.0, 3),
        trades in prop::collection::vec(prop::collection::vec(-80.0f64..80.0, 3), 1..8),
        costs in (0.0f64..0.1, 0.0f64..0.1),
    ) {
        let mut s = PortfolioState { period: 0, cash: 100.0, holdings: vec![5.0, 0.0, 2.0], prices };
        let start = s.wealth();
        for d in &trades {
            let before = s.wealth();
            s = apply_trades(&s, d, &[costs.0; 3], &[costs.1; 3]).state;
            prop_assert!(nonnegative(&s));
            prop_assert!(s.wealth() <= before + 1e-9 * before);
        }
        prop_assert!(s.wealth() <= start + 1e-9 * start);
    }

    #[test]
    fn plan_objective_matches_simulated_wealth(cfg in config()) {
        let (plan, value) = deterministic_plan(&cfg).unwrap();
        let simulated = simulate_plan(&plan, &cfg, &cfg.price_mean);
        prop_assert!(rel_close(value, simulated, 1e-6), "lp {} vs simulated {}", value, simulated);
        for l in 0..cfg.horizon {
            for i in 0..cfg.assets {
                prop_assert!(plan.buys[l][i] == 0.0 || plan.sells[l][i] == 0.0);
                prop_assert!(plan.buys[l][i] <= cfg.trade_bound && plan.sells[l][i] <= cfg.trade_bound);
            }
        }
    }

    #[test]
    fn plan_beats_random_feasible_plans(cfg in config(), raw in prop::collection::vec(-60.0f64..60.0, 18)) {
        let (_, value) = deterministic_plan(&cfg).unwrap();
        let deltas: Vec<Vec<f64>> = (0..cfg.horizon).map(|l| (0..cfg.assets).map(|i| raw[l * 3 + i]).collect()).collect();
        let wealth = simulate_plan(&TradePlan::from_deltas(&deltas), &cfg, &cfg.price_mean);
        prop_assert!(wealth <= value + 1e-7 * value.abs().max(1.0), "random {} beats lp {}", wealth, value);
    }

    #[test]
    fn higher_costs_never_help(cfg in config(), extra in 0.0f64..0.05) {
        let (_, cheap) = deterministic_plan(&cfg).unwrap();
        let mut dear = cfg.clone();
        for row in dear.sale_cost.iter_mut().chain(dear.purchase_cost.iter_mut()) {
            row.iter_mut().for_each(|c| *c += extra);
        }
        let (_, costly) = deterministic_plan(&dear).unwrap();
        prop_assert!(costly <= cheap + 1e-7 * cheap);
    }
}

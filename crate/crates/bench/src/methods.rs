//! Baseline methods per environment and single-episode evaluation.

use orbench_core::asset::{deterministic_plan, MpaaEnv, PlanPolicy, TradePlan};
use orbench_core::inventory::{
    optimize_base_stock, oracle_value, training_paths, BaseStockLevels, BaseStockPolicy, DfoOptions,
    InvManagementEnv, ShlpPolicy, SupplyChainConfig,
};
use orbench_core::knapsack::{okp_offline_oracle, solve_exact_dp, GreedyPolicy, KnapsackEnv, TwoBinsPolicy};
use orbench_core::vm::FirstFitPolicy;
use orbench_core::{
    make_env, run_episode, Action, EnvConfig, Environment, EpisodeRecord, Error as CoreError, Observation, Policy,
    RandomPolicy, ENV_IDS,
};

use crate::error::{usage, Result};

/// Sample paths the base-stock levels are fitted on before evaluation.
pub const DFO_TRAINING_PATHS: usize = 4;

/// Methods available for `env`, reference method first.
pub fn env_methods(env: &str) -> Result<&'static [&'static str]> {
    Ok(match env {
        "knapsack-binary" | "knapsack-bounded" => &["dp", "greedy", "random"],
        "knapsack-online" => &["oracle", "twobins", "random"],
        "vm-packing" | "vm-packing-masked" => &["first-fit", "random"],
        "inv-management-v0" | "inv-management-v1" => &["oracle", "shlp", "dfo"],
        "asset-allocation" => &["lp-plan", "hold", "random"],
        _ => return Err(usage(format!("unknown environment '{env}'; valid ids: {}", ENV_IDS.join(", ")))),
    })
}

/// The method performance ratios are measured against.
pub fn reference_method(env: &str) -> Result<&'static str> {
    Ok(env_methods(env)?[0])
}

/// Total reward of one episode and, for causal policies, its trajectory.
///
/// Offline oracles see the whole episode in advance and have no trajectory.
#[derive(Clone, Debug)]
pub struct EpisodeOutcome {
    pub total: f64,
    pub record: Option<EpisodeRecord>,
}

#[derive(Clone, Debug)]
enum Prepared {
    Dp,
    Greedy,
    Random,
    OnlineOracle,
    TwoBins,
    FirstFit,
    InventoryOracle(SupplyChainConfig),
    Shlp(SupplyChainConfig),
    BaseStock(SupplyChainConfig, BaseStockLevels),
    Plan(TradePlan),
}

/// A method bound to an environment, with any offline work (DFO fitting,
/// plan LPs) already done.
#[derive(Clone, Debug)]
pub struct MethodRunner {
    env: String,
    config: EnvConfig,
    method: String,
    prepared: Prepared,
}

impl MethodRunner {
    /// Fails with a usage error unless `method` applies to `env`.
    pub fn check(env: &str, method: &str) -> Result<()> {
        let methods = env_methods(env)?;
        if !methods.contains(&method) {
            return Err(usage(format!(
                "method '{method}' does not apply to {env}; valid methods: {}",
                methods.join(", ")
            )));
        }
        Ok(())
    }

    /// `seed` only affects methods that train before evaluation.
    pub fn prepare(env: &str, config: &EnvConfig, method: &str, seed: u64) -> Result<Self> {
        Self::check(env, method)?;
        let probe = make_env(env, config)?;
        let prepared = match method {
            "dp" => Prepared::Dp,
            "greedy" => Prepared::Greedy,
            "random" => Prepared::Random,
            "twobins" => Prepared::TwoBins,
            "first-fit" => Prepared::FirstFit,
            "oracle" if env == "knapsack-online" => Prepared::OnlineOracle,
            "oracle" => Prepared::InventoryOracle(inventory_config(probe.as_ref())),
            "shlp" => Prepared::Shlp(inventory_config(probe.as_ref())),
            "dfo" => {
                let c = inventory_config(probe.as_ref());
                let paths = training_paths(&c, DFO_TRAINING_PATHS, seed);
                let fit = optimize_base_stock(&c, &paths, &DfoOptions::default())?;
                log::info!("{env}: base-stock levels {:?} (training objective {:.3})", fit.levels.levels(), fit.objective);
                Prepared::BaseStock(c, fit.levels)
            }
            "lp-plan" => {
                let c = probe.as_any().downcast_ref::<MpaaEnv>().expect("asset env").config();
                Prepared::Plan(deterministic_plan(c)?.0)
            }
            "hold" => {
                let c = probe.as_any().downcast_ref::<MpaaEnv>().expect("asset env").config();
                Prepared::Plan(TradePlan::zero(c.horizon, c.assets))
            }
            _ => unreachable!("method list checked above"),
        };
        Ok(Self { env: env.to_string(), config: config.clone(), method: method.to_string(), prepared })
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn env(&self) -> &str {
        &self.env
    }

    /// Runs the episode that `reset(Some(seed))` starts on a fresh environment.
    pub fn episode(&self, seed: u64) -> Result<EpisodeOutcome> {
        let mut env = make_env(&self.env, &self.config)?;
        let env = env.as_mut();
        let record = match &self.prepared {
            Prepared::Dp => {
                env.reset(Some(seed))?;
                let inst = env.as_any().downcast_ref::<KnapsackEnv>().and_then(KnapsackEnv::instance).cloned();
                let sol = solve_exact_dp(&inst.expect("knapsack env after reset"))?;
                run_episode(env, &mut SelectionPolicy { left: sol.counts }, seed)?
            }
            Prepared::OnlineOracle => {
                env.reset(Some(seed))?;
                let mut done = false;
                while !done {
                    done = env.step(&Action::Discrete(0))?.done;
                }
                let kp = env.as_any().downcast_ref::<KnapsackEnv>().expect("knapsack env");
                let capacity = kp.instance().expect("instance after reset").capacity;
                let total = okp_offline_oracle(&kp.drawn_items(), capacity)?;
                return Ok(EpisodeOutcome { total, record: None });
            }
            Prepared::InventoryOracle(c) => {
                env.reset(Some(seed))?;
                let inv = env.as_any().downcast_ref::<InvManagementEnv>().expect("inventory env");
                let total = oracle_value(inv.demand_path().expect("path after reset"), c)?.value;
                return Ok(EpisodeOutcome { total, record: None });
            }
            Prepared::Greedy => run_episode(env, &mut GreedyPolicy::default(), seed)?,
            Prepared::Random => {
                let space = env.action_space();
                run_episode(env, &mut RandomPolicy::new(space), seed)?
            }
            Prepared::TwoBins => run_episode(env, &mut TwoBinsPolicy::default(), seed)?,
            Prepared::FirstFit => run_episode(env, &mut FirstFitPolicy, seed)?,
            Prepared::Shlp(c) => run_episode(env, &mut ShlpPolicy::new(c.clone()), seed)?,
            Prepared::BaseStock(c, levels) => run_episode(env, &mut BaseStockPolicy::new(c.clone(), levels.clone()), seed)?,
            Prepared::Plan(plan) => run_episode(env, &mut PlanPolicy::new(plan.clone()), seed)?,
        };
        Ok(EpisodeOutcome { total: record.total_reward, record: Some(record) })
    }
}

fn inventory_config(env: &dyn Environment) -> SupplyChainConfig {
    env.as_any().downcast_ref::<InvManagementEnv>().expect("inventory env").config().clone()
}

/// Packs a precomputed selection, one copy per step.
struct SelectionPolicy {
    left: Vec<u64>,
}

impl Policy for SelectionPolicy {
    fn act(&mut self, _obs: &Observation) -> orbench_core::Result<Action> {
        let i = self
            .left
            .iter()
            .position(|&c| c > 0)
            .ok_or_else(|| CoreError::Domain("selection exhausted before the episode ended".into()))?;
        self.left[i] -= 1;
        Ok(Action::Discrete(i))
    }
}

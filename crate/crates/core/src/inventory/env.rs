use std::any::Any;
use std::collections::BTreeMap;

use super::{sample_demand_path, transition, SupplyChainConfig, SupplyChainState};
use crate::config::EnvConfig;
use crate::env::{Action, ActionSpace, Environment, Observation, ObservationSpace, SeedCounter, StepResult};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Multi-echelon inventory control.
///
/// Observation: see [`SupplyChainState::to_observation`]. Action: integer
/// reorder request per stage in `[0, capacity[m]]`. Reward: discounted
/// profit of all stages for the period. The whole demand path is drawn at
/// reset so it does not depend on the actions taken.
#[derive(Clone, Debug)]
pub struct InvManagementEnv {
    config: SupplyChainConfig,
    seeds: SeedCounter,
    episode: Option<(SupplyChainState, Vec<u64>)>,
}

impl InvManagementEnv {
    pub fn new(config: SupplyChainConfig, seed: Option<u64>) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, seeds: SeedCounter::new(seed), episode: None })
    }

    /// `inv-management-v0` (backlog) or `inv-management-v1` (lost sales).
    pub fn from_config(backlog: bool, cfg: &EnvConfig) -> Result<Self> {
        let (id, base) = if backlog {
            ("inv-management-v0", SupplyChainConfig::standard())
        } else {
            ("inv-management-v1", SupplyChainConfig::lost_sales())
        };
        Self::new(SupplyChainConfig::from_config(id, base, cfg)?, cfg.seed)
    }

    pub fn config(&self) -> &SupplyChainConfig {
        &self.config
    }

    pub fn state(&self) -> Option<&SupplyChainState> {
        self.episode.as_ref().map(|e| &e.0)
    }

    /// Demand of every period of the current episode.
    pub fn demand_path(&self) -> Option<&[u64]> {
        self.episode.as_ref().map(|e| e.1.as_slice())
    }

    /// Starts an episode on a given demand path instead of a sampled one.
    pub fn reset_with_path(&mut self, path: Vec<u64>) -> Result<Observation> {
        if path.len() != self.config.periods {
            return Err(Error::config(format!("demand path has {} periods, expected {}", path.len(), self.config.periods)));
        }
        let s = SupplyChainState::initial(&self.config);
        let obs = Observation::new(s.to_observation(&self.config));
        self.episode = Some((s, path));
        Ok(obs)
    }
}

impl Environment for InvManagementEnv {
    fn id(&self) -> &'static str {
        if self.config.backlog {
            "inv-management-v0"
        } else {
            "inv-management-v1"
        }
    }

    fn observation_space(&self) -> ObservationSpace {
        let size = SupplyChainState::observation_size(&self.config);
        ObservationSpace { low: vec![0.0; size], high: vec![f64::INFINITY; size] }
    }

    fn action_space(&self) -> ActionSpace {
        let m = self.config.stages();
        ActionSpace::IntegerBox { low: vec![0; m], high: self.config.capacity.iter().map(|&c| c as i64).collect() }
    }

    fn max_steps(&self) -> usize {
        self.config.periods
    }

    fn reset(&mut self, seed: Option<u64>) -> Result<Observation> {
        let seed = self.seeds.next(seed);
        let path = sample_demand_path(&self.config, &mut RngStream::new(seed, "inventory/demand"));
        self.reset_with_path(path)
    }

    fn step(&mut self, action: &Action) -> Result<StepResult> {
        let (state, path) = self.episode.as_ref().ok_or(Error::NotReset)?;
        if state.period >= self.config.periods {
            return Err(Error::EpisodeDone);
        }
        self.action_space().check(action)?;
        let Action::Integers(req) = action else { unreachable!("checked against an integer box") };
        let req: Vec<u64> = req.iter().map(|&x| x as u64).collect();
        let demand = path[state.period];
        let out = transition(&self.config, state, &req, demand);
        let mut info = BTreeMap::new();
        info.insert("demand".to_string(), demand as f64);
        info.insert("retailer_sales".to_string(), out.sales[0] as f64);
        info.insert("retailer_unfulfilled".to_string(), out.unfulfilled[0] as f64);
        let reward = out.total_profit();
        let done = out.state.period >= self.config.periods;
        let observation = Observation::new(out.state.to_observation(&self.config));
        self.episode.as_mut().expect("episode present").0 = out.state;
        Ok(StepResult { observation, reward, done, info })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reset_shows_initial_inventory() {
        let mut env = InvManagementEnv::new(SupplyChainConfig::standard(), None).unwrap();
        let obs = env.reset(Some(1)).unwrap();
        assert_eq!(&obs.values[..3], &[100.0, 100.0, 200.0]);
        assert!(obs.values[3..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_demand_zero_orders_pays_holding_only() {
        let c = SupplyChainConfig::standard();
        let mut env = InvManagementEnv::new(c.clone(), None).unwrap();
        env.reset_with_path(vec![0; 30]).unwrap();
        let hold = 100.0 * 0.15 + 100.0 * 0.10 + 200.0 * 0.05;
        for t in 0..30 {
            let r = env.step(&Action::Integers(vec![0, 0, 0])).unwrap();
            assert!((r.reward + c.discount.powi(t) * hold).abs() < 1e-9);
            assert_eq!(r.done, t == 29);
        }
        assert!(matches!(env.step(&Action::Integers(vec![0, 0, 0])), Err(Error::EpisodeDone)));
    }

    #[test]
    fn over_capacity_request_is_rejected() {
        let mut env = InvManagementEnv::new(SupplyChainConfig::standard(), None).unwrap();
        env.reset(Some(0)).unwrap();
        assert!(matches!(env.step(&Action::Integers(vec![101, 0, 0])), Err(Error::Domain(_))));
        assert!(matches!(env.step(&Action::Integers(vec![-1, 0, 0])), Err(Error::Domain(_))));
        assert!(env.step(&Action::Integers(vec![100, 90, 80])).is_ok());
    }
}

use std::any::Any;
use std::collections::BTreeMap;

use super::{apply_trades, sample_prices, MpaaConfig, PortfolioState};
use crate::config::EnvConfig;
use crate::env::{Action, ActionSpace, Environment, Observation, ObservationSpace, SeedCounter, StepResult};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Multi-period asset allocation.
///
/// Observation: `[l, cash, x_1..x_n, P_1^l..P_n^l]`. Action: signed trade
/// per asset in `[-trade_bound, trade_bound]`, projected onto what the
/// portfolio can afford. Reward: 0 until the last period, then the wealth
/// valued at the final prices.
#[derive(Clone, Debug)]
pub struct MpaaEnv {
    config: MpaaConfig,
    seeds: SeedCounter,
    episode: Option<(PortfolioState, Vec<Vec<f64>>)>,
}

impl MpaaEnv {
    pub fn new(config: MpaaConfig, seed: Option<u64>) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, seeds: SeedCounter::new(seed), episode: None })
    }

    pub fn from_config(cfg: &EnvConfig) -> Result<Self> {
        Self::new(MpaaConfig::from_config(cfg)?, cfg.seed)
    }

    pub fn config(&self) -> &MpaaConfig {
        &self.config
    }

    pub fn state(&self) -> Option<&PortfolioState> {
        self.episode.as_ref().map(|e| &e.0)
    }

    /// Prices of periods `0..=L` for the current episode.
    pub fn price_path(&self) -> Option<&[Vec<f64>]> {
        self.episode.as_ref().map(|e| e.1.as_slice())
    }

    pub fn reset_with_prices(&mut self, prices: Vec<Vec<f64>>) -> Result<Observation> {
        let c = &self.config;
        if prices.len() != c.horizon + 1 || prices.iter().any(|r| r.len() != c.assets) {
            return Err(Error::config(format!("price path must be {} x {}", c.horizon + 1, c.assets)));
        }
        let state = PortfolioState {
            period: 0,
            cash: c.initial_cash,
            holdings: c.initial_holdings.clone(),
            prices: prices[0].clone(),
        };
        let obs = observe(&state);
        self.episode = Some((state, prices));
        Ok(obs)
    }
}

fn observe(s: &PortfolioState) -> Observation {
    let mut v = Vec::with_capacity(2 + 2 * s.holdings.len());
    v.push(s.period as f64);
    v.push(s.cash);
    v.extend_from_slice(&s.holdings);
    v.extend_from_slice(&s.prices);
    Observation::new(v)
}

impl Environment for MpaaEnv {
    fn id(&self) -> &'static str {
        "asset-allocation"
    }

    fn observation_space(&self) -> ObservationSpace {
        let size = 2 + 2 * self.config.assets;
        ObservationSpace { low: vec![0.0; size], high: vec![f64::INFINITY; size] }
    }

    fn action_space(&self) -> ActionSpace {
        let b = self.config.trade_bound;
        ActionSpace::RealBox { low: vec![-b; self.config.assets], high: vec![b; self.config.assets] }
    }

    fn max_steps(&self) -> usize {
        self.config.horizon
    }

    fn reset(&mut self, seed: Option<u64>) -> Result<Observation> {
        let seed = self.seeds.next(seed);
        let prices = sample_prices(&self.config, &mut RngStream::new(seed, "mpaa/prices"));
        self.reset_with_prices(prices)
    }

    fn step(&mut self, action: &Action) -> Result<StepResult> {
        let space = self.action_space();
        let c = &self.config;
        let (state, prices) = self.episode.as_mut().ok_or(Error::NotReset)?;
        if state.period >= c.horizon {
            return Err(Error::EpisodeDone);
        }
        space.check(action)?;
        let Action::Reals(delta) = action else { unreachable!("checked against a real box") };
        let l = state.period;
        let out = apply_trades(state, delta, &c.sale_cost[l], &c.purchase_cost[l]);
        let mut next = out.state;
        next.period = l + 1;
        next.prices = prices[l + 1].clone();
        let done = next.period == c.horizon;
        let reward = if done { next.wealth() } else { 0.0 };
        let mut info = BTreeMap::new();
        info.insert("buy_scale".to_string(), out.buy_scale);
        info.insert("sells_capped".to_string(), out.sells_capped as f64);
        info.insert("wealth".to_string(), next.wealth());
        let observation = observe(&next);
        *state = next;
        Ok(StepResult { observation, reward, done, info })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

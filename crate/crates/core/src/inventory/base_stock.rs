use rand::RngCore;

use super::{sample_demand_path, transition, SupplyChainConfig, SupplyChainState};
use crate::env::{Action, Observation, Policy};
use crate::error::{Error, Result};
use crate::optim::{integer_polish, powell_optimize, PolishResult, PowellOptions, PowellResult};
use crate::rng::RngStream;

/// Echelon base-stock targets, stored as nonnegative increments so the
/// cumulative levels are monotone by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseStockLevels {
    increments: Vec<f64>,
}

impl BaseStockLevels {
    pub fn from_increments(increments: Vec<f64>) -> Result<Self> {
        if increments.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::config(format!("base-stock increments must be finite and >= 0, got {increments:?}")));
        }
        Ok(Self { increments })
    }

    pub fn from_levels(levels: &[f64]) -> Result<Self> {
        let mut prev = 0.0;
        let mut inc = Vec::with_capacity(levels.len());
        for &z in levels {
            inc.push(z - prev);
            prev = z;
        }
        Self::from_increments(inc)
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn levels(&self) -> Vec<f64> {
        self.increments
            .iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }
}

/// Orders that raise each echelon inventory position to its target.
///
/// The echelon position of stage `m` sums on-hand plus in-transit minus
/// backlog over stages `0..=m`. Requests are rounded, then capped at the
/// stage's capacity.
pub fn base_stock_requests(state: &SupplyChainState, levels: &BaseStockLevels, config: &SupplyChainConfig) -> Vec<u64> {
    let z = levels.levels();
    let mut position = 0.0;
    (0..config.stages())
        .map(|m| {
            position += state.on_hand[m] as f64 + state.in_transit(m) as f64 - state.backlog[m] as f64;
            let want = (z[m] - position).max(0.0).round();
            (want as u64).min(config.capacity[m])
        })
        .collect()
}

/// [`base_stock_requests`] further capped at the supplier's on-hand stock,
/// so the policy never asks for more than can ship this period.
pub fn base_stock_orders(state: &SupplyChainState, levels: &BaseStockLevels, config: &SupplyChainConfig) -> Vec<u64> {
    let mut r = base_stock_requests(state, levels, config);
    for m in 0..r.len().saturating_sub(1) {
        r[m] = r[m].min(state.on_hand[m + 1]);
    }
    r
}

/// Total discounted profit of `policy` on one demand path.
pub fn simulate_path<P>(config: &SupplyChainConfig, demand: &[u64], mut policy: P) -> f64
where
    P: FnMut(&SupplyChainState) -> Vec<u64>,
{
    let mut state = SupplyChainState::initial(config);
    let mut total = 0.0;
    for &d in demand {
        let req = policy(&state);
        let out = transition(config, &state, &req, d);
        total += out.total_profit();
        state = out.state;
    }
    total
}

/// Mean over `paths` of base-stock profit, divided by the horizon. Orders come
/// from [`base_stock_orders`].
pub fn sample_path_objective(levels: &BaseStockLevels, paths: &[Vec<u64>], config: &SupplyChainConfig) -> f64 {
    assert!(!paths.is_empty(), "at least one sample path");
    let total: f64 =
        paths.iter().map(|p| simulate_path(config, p, |s| base_stock_orders(s, levels, config))).sum();
    total / paths.len() as f64 / config.periods as f64
}

/// `count` demand paths from the `inventory/dfo-train` stream of `seed`.
pub fn training_paths(config: &SupplyChainConfig, count: usize, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = RngStream::new(seed, "inventory/dfo-train");
    (0..count).map(|_| sample_demand_path(config, &mut rng as &mut dyn RngCore)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DfoOptions {
    /// Starting increments.
    pub start: Vec<f64>,
    pub powell: PowellOptions,
    pub polish: bool,
}

impl Default for DfoOptions {
    fn default() -> Self {
        Self {
            start: vec![20.0; 3],
            powell: PowellOptions {
                tolerance: 1e-2,
                max_iterations: 50,
                initial_step: 10.0,
                line_tolerance: 1e-3,
                nonnegative: true,
            },
            polish: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DfoResult {
    pub levels: BaseStockLevels,
    /// Objective of `levels` on the training paths.
    pub objective: f64,
    pub powell: PowellResult,
    pub polish: Option<PolishResult>,
}

/// Fits base-stock increments to fixed sample paths, then moves to the best
/// nearby integer point.
pub fn optimize_base_stock(config: &SupplyChainConfig, paths: &[Vec<u64>], options: &DfoOptions) -> Result<DfoResult> {
    if paths.is_empty() {
        return Err(Error::config("base-stock optimization needs at least one sample path"));
    }
    if options.start.len() != config.stages() {
        return Err(Error::config(format!("start has {} entries for {} stages", options.start.len(), config.stages())));
    }
    let eval = |x: &[f64]| {
        let x: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        sample_path_objective(&BaseStockLevels { increments: x }, paths, config)
    };
    let powell = powell_optimize(eval, &options.start, &options.powell);
    let (x, objective, polish) = if options.polish {
        let p = integer_polish(&powell.x, eval);
        (p.x.clone(), p.value, Some(p))
    } else {
        let x: Vec<f64> = powell.x.iter().map(|v| v.round()).collect();
        let v = eval(&x);
        (x, v, None)
    };
    Ok(DfoResult { levels: BaseStockLevels::from_increments(x)?, objective, powell, polish })
}

/// Base-stock policy over the inventory observation layout.
pub struct BaseStockPolicy {
    config: SupplyChainConfig,
    levels: BaseStockLevels,
}

impl BaseStockPolicy {
    pub fn new(config: SupplyChainConfig, levels: BaseStockLevels) -> Self {
        Self { config, levels }
    }
}

impl Policy for BaseStockPolicy {
    fn act(&mut self, obs: &Observation) -> Result<Action> {
        let state = SupplyChainState::from_observation(&obs.values, &self.config)?;
        let r = base_stock_orders(&state, &self.levels, &self.config);
        Ok(Action::Integers(r.into_iter().map(|x| x as i64).collect()))
    }
}

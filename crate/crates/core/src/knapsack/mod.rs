//! Knapsack environments and their baselines.

mod dp;
mod env;
mod heuristics;
mod instance;

pub use dp::{okp_offline_oracle, solve_exact_dp, DpSolution};
pub use env::{InstanceSource, KnapsackEnv, KnapsackState, KnapsackVariant, OkpConfig};
pub use heuristics::{
    greedy_order, greedy_policy, greedy_solution, twobins_policy, GreedyPolicy, OnlineDecision, TwoBinsPolicy,
};
pub use instance::{InstanceGenerator, KnapsackInstance};

use crate::env::Observation;
use crate::error::{Error, Result};

/// Borrowed view of an offline knapsack observation.
#[derive(Debug)]
pub struct OfflineView<'a> {
    pub values: &'a [f64],
    pub weights: &'a [f64],
    pub remaining: &'a [f64],
    pub load: f64,
    pub capacity: f64,
}

impl<'a> OfflineView<'a> {
    pub fn decode(obs: &'a Observation) -> Result<Self> {
        let len = obs.values.len();
        if len < 2 || (len - 2) % 3 != 0 {
            return Err(Error::domain(format!("observation of length {len} is not an offline knapsack layout")));
        }
        let n = (len - 2) / 3;
        let v = &obs.values;
        Ok(Self {
            values: &v[..n],
            weights: &v[n..2 * n],
            remaining: &v[2 * n..3 * n],
            load: v[3 * n],
            capacity: v[3 * n + 1],
        })
    }
}

//! Online placement of two-dimensional VM requests onto machines.

mod cluster;
mod demand;
mod env;

pub use cluster::{action_mask, first_fit_policy, step_reward, ClusterState, FIT_TOL};
pub use demand::{generate_demand, read_trace, write_trace, DemandModel, VmRequest};
pub use env::{DemandSource, VmPackingConfig, VmPackingEnv};

use crate::env::{Action, Observation, Policy};
use crate::error::{Error, Result};

/// Rebuilds the cluster and pending request from an observation.
pub fn decode_observation(obs: &Observation) -> Result<(ClusterState, VmRequest)> {
    let len = obs.values.len();
    if len < 2 || (len - 2) % 3 != 0 {
        return Err(Error::domain(format!("observation of length {len} is not a VM packing layout")));
    }
    let n = (len - 2) / 3;
    let v = &obs.values;
    let cluster = ClusterState {
        cpu: v[n..2 * n].to_vec(),
        mem: v[2 * n..3 * n].to_vec(),
        hosted: v[..n].iter().map(|&o| usize::from(o > 0.0)).collect(),
        step: 0,
    };
    let request = VmRequest { cpu: v[3 * n], mem: v[3 * n + 1], arrival: 0, duration: None };
    Ok((cluster, request))
}

/// First-fit over the observation layout.
#[derive(Default)]
pub struct FirstFitPolicy;

impl Policy for FirstFitPolicy {
    fn act(&mut self, obs: &Observation) -> Result<Action> {
        let (cluster, request) = decode_observation(obs)?;
        first_fit_policy(&cluster, &request).map(Action::Discrete)
    }
}

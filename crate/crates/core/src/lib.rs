//! Seedable operations-research environments and their baselines.
//!
//! Every environment implements [`Environment`]: flat real observations,
//! an optional action mask, and rewards in the problem's own units. The
//! [`registry`] builds any of them from an id and string-keyed overrides.

pub mod asset;
pub mod config;
pub mod env;
pub mod error;
pub mod inventory;
pub mod knapsack;
pub mod optim;
pub mod registry;
pub mod rng;
pub mod vm;

pub use config::{ConfigValue, EnvConfig};
pub use env::{
    replay, run_episode, Action, ActionSpace, Environment, EpisodeRecord, FnPolicy, Observation, ObservationSpace,
    Policy, RandomPolicy, StepResult, Transition,
};
pub use error::{Error, Result};
pub use registry::{make_env, ENV_IDS};
pub use rng::RngStream;

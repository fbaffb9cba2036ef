//! The environment contract and the episode runner.

use std::any::Any;
use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Flattened state plus an optional feasibility mask over discrete actions.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub values: Vec<f64>,
    pub mask: Option<Vec<bool>>,
}

impl Observation {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, mask: None }
    }

    pub fn with_mask(values: Vec<f64>, mask: Vec<bool>) -> Self {
        Self { values, mask: Some(mask) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    Discrete(usize),
    Integers(Vec<i64>),
    Reals(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ActionSpace {
    Discrete { n: usize },
    IntegerBox { low: Vec<i64>, high: Vec<i64> },
    RealBox { low: Vec<f64>, high: Vec<f64> },
}

impl ActionSpace {
    /// Number of discrete actions, or the vector length for box spaces.
    pub fn size(&self) -> usize {
        match self {
            ActionSpace::Discrete { n } => *n,
            ActionSpace::IntegerBox { low, .. } => low.len(),
            ActionSpace::RealBox { low, .. } => low.len(),
        }
    }

    /// Checks `action` against the space. Nothing is clipped.
    pub fn check(&self, action: &Action) -> Result<()> {
        match (self, action) {
            (ActionSpace::Discrete { n }, Action::Discrete(a)) => {
                if a >= n {
                    return Err(Error::domain(format!("action {a} outside 0..{n}")));
                }
            }
            (ActionSpace::IntegerBox { low, high }, Action::Integers(v)) => {
                if v.len() != low.len() {
                    return Err(Error::domain(format!("expected {} integers, got {}", low.len(), v.len())));
                }
                for (i, &x) in v.iter().enumerate() {
                    if x < low[i] || x > high[i] {
                        return Err(Error::domain(format!(
                            "component {i} = {x} outside [{}, {}]",
                            low[i], high[i]
                        )));
                    }
                }
            }
            (ActionSpace::RealBox { low, high }, Action::Reals(v)) => {
                if v.len() != low.len() {
                    return Err(Error::domain(format!("expected {} reals, got {}", low.len(), v.len())));
                }
                for (i, &x) in v.iter().enumerate() {
                    if !(x >= low[i] && x <= high[i]) {
                        return Err(Error::domain(format!(
                            "component {i} = {x} outside [{}, {}]",
                            low[i], high[i]
                        )));
                    }
                }
            }
            _ => return Err(Error::domain(format!("action {action:?} does not match space {self:?}"))),
        }
        Ok(())
    }
}

/// Per-component observation bounds; the length is the observation size.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSpace {
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

impl ObservationSpace {
    pub fn size(&self) -> usize {
        self.low.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: BTreeMap<String, f64>,
}

/// An episodic environment.
///
/// `reset(Some(seed))` regenerates all episode randomness from `seed`;
/// `reset(None)` uses the configured seed for the first episode and the
/// following integers for later ones. `step` after `done` returns
/// [`Error::EpisodeDone`].
pub trait Environment: Send {
    fn id(&self) -> &'static str;
    fn observation_space(&self) -> ObservationSpace;
    fn action_space(&self) -> ActionSpace;
    /// Upper bound on the steps of any episode.
    fn max_steps(&self) -> usize;
    fn reset(&mut self, seed: Option<u64>) -> Result<Observation>;
    fn step(&mut self, action: &Action) -> Result<StepResult>;
    fn as_any(&self) -> &dyn Any;
}

/// Seed bookkeeping shared by the concrete environments.
#[derive(Clone, Debug)]
pub(crate) struct SeedCounter {
    base: u64,
    episodes: u64,
}

impl SeedCounter {
    pub(crate) fn new(base: Option<u64>) -> Self {
        Self { base: base.unwrap_or(0), episodes: 0 }
    }

    pub(crate) fn next(&mut self, explicit: Option<u64>) -> u64 {
        let seed = explicit.unwrap_or_else(|| self.base.wrapping_add(self.episodes));
        self.episodes += 1;
        seed
    }
}

/// Maps observations to actions. Policies see only what the agent sees.
pub trait Policy {
    /// Called once per episode before the first `act`, with the episode seed.
    fn begin_episode(&mut self, _seed: u64) {}
    fn act(&mut self, observation: &Observation) -> Result<Action>;
}

/// Wraps a closure as a [`Policy`].
pub struct FnPolicy<F>(pub F);

impl<F: FnMut(&Observation) -> Action> Policy for FnPolicy<F> {
    fn act(&mut self, observation: &Observation) -> Result<Action> {
        Ok((self.0)(observation))
    }
}

/// Uniform over mask-permitted discrete actions, or uniform in a box.
pub struct RandomPolicy {
    space: ActionSpace,
    rng: RngStream,
}

impl RandomPolicy {
    pub fn new(space: ActionSpace) -> Self {
        Self { space, rng: RngStream::new(0, "policy/random") }
    }
}

impl Policy for RandomPolicy {
    fn begin_episode(&mut self, seed: u64) {
        self.rng = RngStream::new(seed, "policy/random");
    }

    fn act(&mut self, obs: &Observation) -> Result<Action> {
        Ok(match &self.space {
            ActionSpace::Discrete { n } => {
                let allowed: Vec<usize> = match &obs.mask {
                    Some(mask) => (0..*n).filter(|&i| mask[i]).collect(),
                    None => (0..*n).collect(),
                };
                // With nothing allowed any index is as good as another.
                if allowed.is_empty() {
                    Action::Discrete(0)
                } else {
                    Action::Discrete(allowed[self.rng.random_range(0..allowed.len())])
                }
            }
            ActionSpace::IntegerBox { low, high } => Action::Integers(
                low.iter().zip(high).map(|(&l, &h)| self.rng.random_range(l..=h)).collect(),
            ),
            ActionSpace::RealBox { low, high } => Action::Reals(
                low.iter().zip(high).map(|(&l, &h)| l + (h - l) * self.rng.random::<f64>()).collect(),
            ),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub action: Action,
    pub reward: f64,
    pub done: bool,
    pub observation: Observation,
    pub info: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub initial: Observation,
    pub transitions: Vec<Transition>,
    pub total_reward: f64,
}

impl EpisodeRecord {
    pub fn steps(&self) -> usize {
        self.transitions.len()
    }

    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.transitions.iter().map(|t| &t.action)
    }
}

fn record_step<E: Environment + ?Sized>(
    env: &mut E,
    action: Action,
    step: usize,
    record: &mut EpisodeRecord,
) -> Result<bool> {
    let result = env
        .step(&action)
        .map_err(|e| Error::InvalidAction { step, source: Box::new(e) })?;
    record.total_reward += result.reward;
    let done = result.done;
    record.transitions.push(Transition {
        action,
        reward: result.reward,
        done,
        observation: result.observation,
        info: result.info,
    });
    Ok(done)
}

/// Runs one episode from `reset(Some(seed))` until `done`.
///
/// Stops with an error after `max_steps` steps without termination.
pub fn run_episode<E, P>(env: &mut E, policy: &mut P, seed: u64) -> Result<EpisodeRecord>
where
    E: Environment + ?Sized,
    P: Policy + ?Sized,
{
    let initial = env.reset(Some(seed))?;
    policy.begin_episode(seed);
    let mut record = EpisodeRecord { seed, initial: initial.clone(), transitions: Vec::new(), total_reward: 0.0 };
    let limit = env.max_steps();
    let mut obs = initial;
    for step in 0..limit {
        let action = policy.act(&obs).map_err(|e| Error::InvalidAction { step, source: Box::new(e) })?;
        if record_step(env, action, step, &mut record)? {
            return Ok(record);
        }
        obs = record.transitions.last().map(|t| t.observation.clone()).unwrap_or(obs);
    }
    Err(Error::Config(format!("{} did not terminate within {limit} steps", env.id())))
}

/// Re-executes the actions of `record` from its seed.
pub fn replay<E: Environment + ?Sized>(env: &mut E, record: &EpisodeRecord) -> Result<EpisodeRecord> {
    let initial = env.reset(Some(record.seed))?;
    let mut out = EpisodeRecord { seed: record.seed, initial, transitions: Vec::new(), total_reward: 0.0 };
    for (step, action) in record.actions().enumerate() {
        if record_step(env, action.clone(), step, &mut out)? {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_space_rejects_out_of_range() {
        let s = ActionSpace::Discrete { n: 3 };
        assert!(s.check(&Action::Discrete(2)).is_ok());
        assert!(matches!(s.check(&Action::Discrete(3)), Err(Error::Domain(_))));
        assert!(s.check(&Action::Reals(vec![0.0])).is_err());
    }

    #[test]
    fn box_spaces_check_each_component() {
        let s = ActionSpace::IntegerBox { low: vec![0, 0], high: vec![5, 3] };
        assert!(s.check(&Action::Integers(vec![5, 3])).is_ok());
        assert!(s.check(&Action::Integers(vec![-1, 0])).is_err());
        assert!(s.check(&Action::Integers(vec![1])).is_err());
        let s = ActionSpace::RealBox { low: vec![-1.0], high: vec![1.0] };
        assert!(s.check(&Action::Reals(vec![f64::NAN])).is_err());
        assert!(s.check(&Action::Reals(vec![1.0])).is_ok());
    }

    #[test]
    fn random_policy_respects_mask() {
        let mut p = RandomPolicy::new(ActionSpace::Discrete { n: 4 });
        p.begin_episode(3);
        let obs = Observation::with_mask(vec![], vec![false, false, true, false]);
        for _ in 0..50 {
            assert_eq!(p.act(&obs).unwrap(), Action::Discrete(2));
        }
    }

    #[test]
    fn seed_counter_prefers_explicit_seeds() {
        let mut c = SeedCounter::new(Some(10));
        assert_eq!(c.next(None), 10);
        assert_eq!(c.next(Some(3)), 3);
        assert_eq!(c.next(None), 12);
    }
}

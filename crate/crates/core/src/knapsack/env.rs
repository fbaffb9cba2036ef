use std::any::Any;
use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use super::{InstanceGenerator, KnapsackInstance};
use crate::config::EnvConfig;
use crate::env::{Action, ActionSpace, Environment, Observation, ObservationSpace, SeedCounter, StepResult};
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnapsackVariant {
    Binary,
    Bounded,
    Online,
}

impl KnapsackVariant {
    pub fn id(self) -> &'static str {
        match self {
            KnapsackVariant::Binary => "knapsack-binary",
            KnapsackVariant::Bounded => "knapsack-bounded",
            KnapsackVariant::Online => "knapsack-online",
        }
    }
}

/// Where each episode's instance comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    Fixed(KnapsackInstance),
    /// A fresh instance per episode, drawn from the episode seed.
    Generated(InstanceGenerator),
}

impl InstanceSource {
    fn items(&self) -> usize {
        match self {
            InstanceSource::Fixed(inst) => inst.len(),
            InstanceSource::Generated(g) => g.items,
        }
    }
}

/// Online draw law: item `i` is shown with probability `probabilities[i]`,
/// for at most `steps` draws.
#[derive(Clone, Debug, PartialEq)]
pub struct OkpConfig {
    pub probabilities: Vec<f64>,
    pub steps: usize,
}

impl OkpConfig {
    pub fn uniform(items: usize, steps: usize) -> Self {
        Self { probabilities: vec![1.0 / items as f64; items], steps }
    }

    pub fn validate(&self, items: usize) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::config("online step limit must be at least 1"));
        }
        if self.probabilities.len() != items {
            return Err(Error::config(format!(
                "{} draw probabilities for {items} items",
                self.probabilities.len()
            )));
        }
        if self.probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::config("draw probabilities must be nonnegative"));
        }
        let total: f64 = self.probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("draw probabilities sum to {total}, expected 1")));
        }
        Ok(())
    }
}

/// Mutable episode state.
#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackState {
    pub remaining: Vec<u64>,
    pub load: u64,
    /// Item currently on offer (online variant only).
    pub current_item: Option<usize>,
    pub steps: usize,
}

#[derive(Clone, Debug)]
struct Episode {
    instance: KnapsackInstance,
    state: KnapsackState,
    draws: Vec<usize>,
    done: bool,
}

/// Binary, bounded and online knapsack.
///
/// Offline observation: `[v_0..v_{n-1}, w_0.., remaining_0.., load, W]` with
/// a mask of items that fit. Action: item index; an item that does not fit
/// or has no copies left is a no-op with reward 0.
///
/// Online observation: `[v, w, load, W]` of the item on offer, mask
/// `[true, fits]`. Action 0 rejects, 1 accepts.
#[derive(Clone, Debug)]
pub struct KnapsackEnv {
    variant: KnapsackVariant,
    source: InstanceSource,
    okp: Option<OkpConfig>,
    seeds: SeedCounter,
    episode: Option<Episode>,
}

impl KnapsackEnv {
    pub fn new(variant: KnapsackVariant, source: InstanceSource, okp: Option<OkpConfig>, seed: Option<u64>) -> Result<Self> {
        let items = source.items();
        if items == 0 {
            return Err(Error::config("knapsack needs at least one item"));
        }
        match (variant, &okp) {
            (KnapsackVariant::Online, None) => return Err(Error::config("online knapsack requires draw settings")),
            (KnapsackVariant::Online, Some(o)) => o.validate(items)?,
            (_, Some(_)) => return Err(Error::config(format!("{} takes no online draw settings", variant.id()))),
            _ => {}
        }
        match &source {
            InstanceSource::Fixed(inst) => {
                if variant == KnapsackVariant::Binary && !inst.is_binary() {
                    return Err(Error::config("binary knapsack instance has counts above 1"));
                }
            }
            InstanceSource::Generated(g) => {
                g.validate()?;
                if variant != KnapsackVariant::Bounded && g.max_count != 1 {
                    return Err(Error::config(format!("{} generator must have max_count 1", variant.id())));
                }
            }
        }
        Ok(Self { variant, source, okp, seeds: SeedCounter::new(seed), episode: None })
    }

    /// Builds an environment from string-keyed overrides.
    ///
    /// Keys: `items`, `max_weight`, `max_value`, `max_count` (bounded only),
    /// `capacity`, `instance_file`; online adds `steps` and `probabilities`.
    pub fn from_config(variant: KnapsackVariant, cfg: &EnvConfig) -> Result<Self> {
        let mut keys = vec!["items", "max_weight", "max_value", "capacity", "instance_file"];
        match variant {
            KnapsackVariant::Bounded => keys.push("max_count"),
            KnapsackVariant::Online => keys.extend(["steps", "probabilities"]),
            KnapsackVariant::Binary => {}
        }
        let r = cfg.reader(variant.id(), &keys)?;
        let source = match r.text("instance_file")? {
            Some(path) => {
                let mut inst = KnapsackInstance::read_file(std::path::Path::new(&path))?;
                if let Some(c) = r.u64("capacity")? {
                    inst.capacity = c;
                }
                InstanceSource::Fixed(inst)
            }
            None => {
                let mut g = match variant {
                    KnapsackVariant::Bounded => InstanceGenerator::bounded(),
                    _ => InstanceGenerator::binary(),
                };
                g.items = r.usize("items")?.unwrap_or(g.items);
                g.max_weight = r.u64("max_weight")?.unwrap_or(g.max_weight);
                g.max_value = r.u64("max_value")?.unwrap_or(g.max_value);
                g.max_count = r.u64("max_count")?.unwrap_or(g.max_count);
                g.capacity = r.u64("capacity")?.unwrap_or(g.capacity);
                InstanceSource::Generated(g)
            }
        };
        let okp = match variant {
            KnapsackVariant::Online => {
                let items = source.items();
                let steps = r.usize("steps")?.unwrap_or(50);
                Some(match r.f64_array("probabilities")? {
                    Some(p) => OkpConfig { probabilities: p, steps },
                    None => OkpConfig::uniform(items, steps),
                })
            }
            _ => None,
        };
        Self::new(variant, source, okp, r.seed())
    }

    pub fn variant(&self) -> KnapsackVariant {
        self.variant
    }

    /// Instance of the current episode.
    pub fn instance(&self) -> Option<&KnapsackInstance> {
        self.episode.as_ref().map(|e| &e.instance)
    }

    pub fn state(&self) -> Option<&KnapsackState> {
        self.episode.as_ref().map(|e| &e.state)
    }

    /// Items shown so far in an online episode, as (value, weight).
    pub fn drawn_items(&self) -> Vec<(f64, u64)> {
        let Some(ep) = &self.episode else { return Vec::new() };
        let shown = if ep.done { ep.state.steps } else { ep.state.steps + 1 };
        ep.draws[..shown.min(ep.draws.len())]
            .iter()
            .map(|&i| (ep.instance.values[i], ep.instance.weights[i]))
            .collect()
    }

    fn episode_mut(&mut self) -> Result<&mut Episode> {
        let ep = self.episode.as_mut().ok_or(Error::NotReset)?;
        if ep.done {
            return Err(Error::EpisodeDone);
        }
        Ok(ep)
    }

    fn observe(&self) -> Observation {
        let ep = self.episode.as_ref().expect("observe after reset");
        let inst = &ep.instance;
        let st = &ep.state;
        let room = inst.capacity - st.load;
        match self.variant {
            KnapsackVariant::Online => {
                let (v, w) = match st.current_item {
                    Some(i) if !ep.done => (inst.values[i], inst.weights[i]),
                    _ => (0.0, 0),
                };
                let fits = !ep.done && w <= room;
                Observation::with_mask(vec![v, w as f64, st.load as f64, inst.capacity as f64], vec![true, fits])
            }
            _ => {
                let mut values = Vec::with_capacity(3 * inst.len() + 2);
                values.extend_from_slice(&inst.values);
                values.extend(inst.weights.iter().map(|&w| w as f64));
                values.extend(st.remaining.iter().map(|&c| c as f64));
                values.push(st.load as f64);
                values.push(inst.capacity as f64);
                let mask = (0..inst.len()).map(|i| st.remaining[i] > 0 && inst.weights[i] <= room).collect();
                Observation::with_mask(values, mask)
            }
        }
    }
}

fn anything_fits(ep: &Episode, allowed: impl Fn(usize) -> bool) -> bool {
    let room = ep.instance.capacity - ep.state.load;
    (0..ep.instance.len()).any(|i| allowed(i) && ep.state.remaining[i] > 0 && ep.instance.weights[i] <= room)
}

impl Environment for KnapsackEnv {
    fn id(&self) -> &'static str {
        self.variant.id()
    }

    fn observation_space(&self) -> ObservationSpace {
        let size = match self.variant {
            KnapsackVariant::Online => 4,
            _ => 3 * self.source.items() + 2,
        };
        ObservationSpace { low: vec![0.0; size], high: vec![f64::INFINITY; size] }
    }

    fn action_space(&self) -> ActionSpace {
        match self.variant {
            KnapsackVariant::Online => ActionSpace::Discrete { n: 2 },
            _ => ActionSpace::Discrete { n: self.source.items() },
        }
    }

    fn max_steps(&self) -> usize {
        match (&self.okp, &self.source) {
            (Some(o), _) => o.steps,
            (None, InstanceSource::Fixed(inst)) => inst.counts.iter().sum::<u64>() as usize,
            (None, InstanceSource::Generated(g)) => g.items * g.max_count as usize,
        }
    }

    fn reset(&mut self, seed: Option<u64>) -> Result<Observation> {
        let seed = self.seeds.next(seed);
        let root = RngStream::new(seed, self.variant.id());
        let instance = match &self.source {
            InstanceSource::Fixed(inst) => inst.clone(),
            InstanceSource::Generated(g) => g.generate(&mut root.substream("items")),
        };
        let draws = match &self.okp {
            Some(o) => {
                let law = WeightedIndex::new(&o.probabilities).map_err(|e| Error::config(e.to_string()))?;
                let mut rng = root.substream("draws");
                (0..o.steps).map(|_| law.sample(&mut rng)).collect()
            }
            None => Vec::new(),
        };
        let state = KnapsackState {
            remaining: instance.counts.clone(),
            load: 0,
            current_item: draws.first().copied(),
            steps: 0,
        };
        self.episode = Some(Episode { instance, state, draws, done: false });
        Ok(self.observe())
    }

    fn step(&mut self, action: &Action) -> Result<StepResult> {
        let space = self.action_space();
        let variant = self.variant;
        let probs = self.okp.as_ref().map(|o| o.probabilities.clone());
        let limit = self.max_steps();
        let ep = self.episode_mut()?;
        space.check(action)?;
        let Action::Discrete(a) = *action else { unreachable!("checked against a discrete space") };

        let mut info = BTreeMap::new();
        let mut reward = 0.0;
        let st = &mut ep.state;
        let inst = &ep.instance;
        let (item, take) = match variant {
            KnapsackVariant::Online => (st.current_item.expect("draw on offer"), a == 1),
            _ => (a, true),
        };
        if take {
            if st.remaining[item] > 0 && st.load + inst.weights[item] <= inst.capacity {
                st.load += inst.weights[item];
                if variant != KnapsackVariant::Online {
                    st.remaining[item] -= 1;
                }
                reward = inst.values[item];
            } else {
                info.insert("invalid".to_string(), 1.0);
            }
        }
        st.steps += 1;
        st.current_item = ep.draws.get(st.steps).copied();

        ep.done = st.steps >= limit
            || match &probs {
                Some(p) => !anything_fits(ep, |i| p[i] > 0.0),
                None => !anything_fits(ep, |_| true),
            };
        info.insert("load".to_string(), ep.state.load as f64);
        let done = ep.done;
        Ok(StepResult { observation: self.observe(), reward, done, info })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> KnapsackInstance {
        KnapsackInstance::binary(vec![10.0, 6.0, 12.0], vec![5, 4, 3], 7).unwrap()
    }

    #[test]
    fn selecting_rewards_value_and_ends_when_full() {
        let mut env = KnapsackEnv::new(KnapsackVariant::Binary, InstanceSource::Fixed(abc()), None, None).unwrap();
        env.reset(Some(1)).unwrap();
        let r = env.step(&Action::Discrete(2)).unwrap();
        assert_eq!(r.reward, 12.0);
        assert!(!r.done);
        let r = env.step(&Action::Discrete(1)).unwrap();
        assert_eq!(r.reward, 6.0);
        assert!(r.done);
        assert!(matches!(env.step(&Action::Discrete(0)), Err(Error::EpisodeDone)));
    }

    #[test]
    fn invalid_selection_is_a_noop() {
        let mut env = KnapsackEnv::new(KnapsackVariant::Binary, InstanceSource::Fixed(abc()), None, None).unwrap();
        env.reset(None).unwrap();
        env.step(&Action::Discrete(2)).unwrap();
        let r = env.step(&Action::Discrete(2)).unwrap();
        assert_eq!(r.reward, 0.0);
        assert_eq!(r.info["invalid"], 1.0);
        assert!(!r.done);
        assert_eq!(r.observation.mask.unwrap(), vec![false, true, false]);
        assert!(matches!(env.step(&Action::Discrete(3)), Err(Error::Domain(_))));
    }

    #[test]
    fn variant_mismatch_is_a_config_error() {
        let src = InstanceSource::Fixed(abc());
        assert!(KnapsackEnv::new(KnapsackVariant::Online, src.clone(), None, None).is_err());
        assert!(KnapsackEnv::new(KnapsackVariant::Binary, src.clone(), Some(OkpConfig::uniform(3, 5)), None).is_err());
        let bad = OkpConfig { probabilities: vec![0.5, 0.5, 0.5], steps: 5 };
        assert!(KnapsackEnv::new(KnapsackVariant::Online, src, Some(bad), None).is_err());
    }

    #[test]
    fn online_episode_shows_m_items() {
        let inst = KnapsackInstance::binary(vec![1.0; 4], vec![1; 4], 100).unwrap();
        let mut env =
            KnapsackEnv::new(KnapsackVariant::Online, InstanceSource::Fixed(inst), Some(OkpConfig::uniform(4, 6)), None)
                .unwrap();
        env.reset(Some(2)).unwrap();
        let mut steps = 0;
        loop {
            steps += 1;
            if env.step(&Action::Discrete(1)).unwrap().done {
                break;
            }
        }
        assert_eq!(steps, 6);
        assert_eq!(env.drawn_items().len(), 6);
        assert_eq!(env.state().unwrap().load, 6);
    }
}

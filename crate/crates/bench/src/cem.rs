//! Cross-entropy search over linear policies.

use orbench_core::rng::episode_seed;
use orbench_core::{
    make_env, run_episode, Action, ActionSpace, EnvConfig, Error as CoreError, Observation, ObservationSpace, Policy,
    RngStream,
};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{usage, Result};

/// Scores `W x + b` over the observation scaled by its finite upper bounds.
///
/// Discrete spaces take the highest-scoring action the mask allows (the
/// lowest index on ties); box spaces clamp the scores into the box, rounding
/// for integer boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPolicy {
    space: ActionSpace,
    scale: Vec<f64>,
    /// Row-major `outputs x (inputs + 1)`; the last column is the bias.
    params: Vec<f64>,
}

impl LinearPolicy {
    pub fn parameter_count(action: &ActionSpace, observation: &ObservationSpace) -> usize {
        outputs(action) * (observation.low.len() + 1)
    }

    pub fn new(action: ActionSpace, observation: &ObservationSpace, params: Vec<f64>) -> Result<Self> {
        let want = Self::parameter_count(&action, observation);
        if params.len() != want {
            return Err(usage(format!("linear policy needs {want} parameters, got {}", params.len())));
        }
        let scale = observation.high.iter().map(|&h| if h.is_finite() && h > 0.0 { h } else { 1.0 }).collect();
        Ok(Self { space: action, scale, params })
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    fn scores(&self, obs: &Observation) -> Vec<f64> {
        let inputs = self.scale.len();
        self.params
            .chunks(inputs + 1)
            .map(|row| row[inputs] + row[..inputs].iter().zip(&obs.values).zip(&self.scale).map(|((w, x), s)| w * x / s).sum::<f64>())
            .collect()
    }
}

fn outputs(space: &ActionSpace) -> usize {
    match space {
        ActionSpace::Discrete { n } => *n,
        ActionSpace::IntegerBox { low, .. } => low.len(),
        ActionSpace::RealBox { low, .. } => low.len(),
    }
}

impl Policy for LinearPolicy {
    fn act(&mut self, obs: &Observation) -> orbench_core::Result<Action> {
        if obs.values.len() != self.scale.len() {
            return Err(CoreError::Domain(format!(
                "observation has {} entries, policy expects {}",
                obs.values.len(),
                self.scale.len()
            )));
        }
        let scores = self.scores(obs);
        Ok(match &self.space {
            ActionSpace::Discrete { .. } => {
                let allowed = |i: usize| obs.mask.as_ref().is_none_or(|m| m[i]);
                let any = (0..scores.len()).any(allowed);
                let best = (0..scores.len())
                    .filter(|&i| !any || allowed(i))
                    .fold(None, |best: Option<usize>, i| match best {
                        Some(b) if scores[b] >= scores[i] => Some(b),
                        _ => Some(i),
                    });
                Action::Discrete(best.unwrap_or(0))
            }
            ActionSpace::IntegerBox { low, high } => Action::Integers(
                scores.iter().zip(low.iter().zip(high)).map(|(s, (&l, &h))| (s.round() as i64).clamp(l, h)).collect(),
            ),
            ActionSpace::RealBox { low, high } => {
                Action::Reals(scores.iter().zip(low.iter().zip(high)).map(|(s, (&l, &h))| s.clamp(l, h)).collect())
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct CemOptions {
    pub iterations: usize,
    pub population: usize,
    pub elite_fraction: f64,
    /// Episodes per candidate; the same seeds are used in every iteration.
    pub episodes: usize,
    pub initial_std: f64,
    /// Lower bound on the sampling standard deviation.
    pub min_std: f64,
    pub seed: u64,
}

impl Default for CemOptions {
    fn default() -> Self {
        Self { iterations: 50, population: 64, elite_fraction: 0.2, episodes: 4, initial_std: 1.0, min_std: 0.05, seed: 0 }
    }
}

impl CemOptions {
    /// Number of elites kept per iteration; at least two are needed to
    /// estimate a spread.
    pub fn elites(&self) -> Result<usize> {
        if self.population < 2 {
            return Err(usage(format!("population must be at least 2, got {}", self.population)));
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction <= 1.0) {
            return Err(usage(format!("elite fraction must lie in (0, 1], got {}", self.elite_fraction)));
        }
        let k = (self.population as f64 * self.elite_fraction).floor() as usize;
        if k < 2 {
            return Err(usage(format!(
                "population {} with elite fraction {} keeps {k} elites; at least 2 are needed",
                self.population, self.elite_fraction
            )));
        }
        if self.episodes == 0 {
            return Err(usage("episodes per candidate must be at least 1"));
        }
        Ok(k)
    }
}

#[derive(Clone, Debug)]
pub struct CemResult {
    /// The sampling mean before any update.
    pub initial: LinearPolicy,
    /// The sampling mean after the last update.
    pub policy: LinearPolicy,
    /// Mean episode reward of the elites, one entry per iteration.
    pub curve: Vec<f64>,
    pub eval_seeds: Vec<u64>,
}

/// The small binary knapsack used by the learning demo: 20 generated items
/// of weight and value at most 100, capacity 200.
pub fn small_binkp_config() -> EnvConfig {
    EnvConfig::new().set("items", 20.0).set("capacity", 200.0)
}

fn normal(rng: &mut RngStream) -> f64 {
    StandardNormal.sample(rng)
}

/// Mean total reward of `policy` over episodes started from `seeds`.
pub fn evaluate_policy(env: &str, config: &EnvConfig, policy: &LinearPolicy, seeds: &[u64]) -> Result<f64> {
    let mut e = make_env(env, config)?;
    let mut p = policy.clone();
    let mut total = 0.0;
    for &s in seeds {
        total += run_episode(e.as_mut(), &mut p, s)?.total_reward;
    }
    Ok(total / seeds.len() as f64)
}

/// Cross-entropy method with a diagonal Gaussian over policy parameters.
///
/// The initial mean is itself a random draw, so zero iterations return a
/// random linear policy. Results depend only on `options.seed`.
pub fn cem_train(env: &str, config: &EnvConfig, options: &CemOptions) -> Result<CemResult> {
    let elites = options.elites()?;
    let probe = make_env(env, config)?;
    let (action, observation) = (probe.action_space(), probe.observation_space());
    let dim = LinearPolicy::parameter_count(&action, &observation);
    let root = RngStream::new(options.seed, "cem");

    let mut init = root.substream("init");
    let mut mean: Vec<f64> =
        (0..dim).map(|_| options.initial_std * normal(&mut init)).collect();
    let mut std = vec![options.initial_std; dim];
    let initial = LinearPolicy::new(action.clone(), &observation, mean.clone())?;
    let eval_seeds: Vec<u64> = (0..options.episodes as u64).map(|k| episode_seed(options.seed, k)).collect();

    let mut curve = Vec::with_capacity(options.iterations);
    for it in 0..options.iterations {
        let mut rng = root.substream(&format!("iteration/{it}"));
        let candidates: Vec<Vec<f64>> = (0..options.population)
            .map(|_| {
                mean.iter().zip(&std).map(|(m, s)| m + s * normal(&mut rng)).collect()
            })
            .collect();
        let scores = candidates
            .par_iter()
            .map(|c| evaluate_policy(env, config, &LinearPolicy::new(action.clone(), &observation, c.clone())?, &eval_seeds))
            .collect::<Result<Vec<f64>>>()?;
        let mut order: Vec<usize> = (0..options.population).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let elite = &order[..elites];
        curve.push(elite.iter().map(|&i| scores[i]).sum::<f64>() / elites as f64);
        for j in 0..dim {
            let m = elite.iter().map(|&i| candidates[i][j]).sum::<f64>() / elites as f64;
            let v = elite.iter().map(|&i| (candidates[i][j] - m).powi(2)).sum::<f64>() / elites as f64;
            mean[j] = m;
            std[j] = v.sqrt().max(options.min_std);
        }
        log::debug!("cem iteration {it}: elite mean {:.4}", curve[it]);
    }
    let policy = LinearPolicy::new(action, &observation, mean)?;
    Ok(CemResult { initial, policy, curve, eval_seeds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EnvConfig {
        EnvConfig::new().set("items", 6.0).set("capacity", 60.0)
    }

    #[test]
    fn discrete_argmax_respects_the_mask() {
        let obs_space = ObservationSpace { low: vec![0.0; 2], high: vec![f64::INFINITY; 2] };
        let params = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 5.0];
        let mut p = LinearPolicy::new(ActionSpace::Discrete { n: 3 }, &obs_space, params).unwrap();
        assert_eq!(p.act(&Observation::new(vec![2.0, 1.0])).unwrap(), Action::Discrete(2));
        let masked = Observation::with_mask(vec![2.0, 1.0], vec![true, true, false]);
        assert_eq!(p.act(&masked).unwrap(), Action::Discrete(0));
    }

    #[test]
    fn box_outputs_are_clamped() {
        let obs_space = ObservationSpace { low: vec![0.0], high: vec![10.0] };
        let mut p = LinearPolicy::new(ActionSpace::IntegerBox { low: vec![0], high: vec![5] }, &obs_space, vec![100.0, 0.4]).unwrap();
        assert_eq!(p.act(&Observation::new(vec![10.0])).unwrap(), Action::Integers(vec![5]));
        assert_eq!(p.act(&Observation::new(vec![0.0])).unwrap(), Action::Integers(vec![0]));
    }

    #[test]
    fn zero_iterations_return_the_initial_policy() {
        let opts = CemOptions { iterations: 0, population: 4, elite_fraction: 0.5, ..CemOptions::default() };
        let r = cem_train("knapsack-binary", &small(), &opts).unwrap();
        assert!(r.curve.is_empty());
        assert_eq!(r.policy, r.initial);
    }

    #[test]
    fn identical_seeds_give_identical_curves() {
        let opts = CemOptions { iterations: 3, population: 8, elite_fraction: 0.25, episodes: 2, ..CemOptions::default() };
        let a = cem_train("knapsack-binary", &small(), &opts).unwrap();
        let b = cem_train("knapsack-binary", &small(), &opts).unwrap();
        assert_eq!(a.curve, b.curve);
        assert_eq!(a.policy, b.policy);
    }

    #[test]
    fn degenerate_populations_are_usage_errors() {
        for (population, elite_fraction) in [(1, 0.5), (8, 0.2), (8, 0.0), (8, 1.5)] {
            let opts = CemOptions { population, elite_fraction, ..CemOptions::default() };
            assert!(matches!(opts.elites(), Err(crate::BenchError::Usage(_))), "{population} {elite_fraction}");
        }
    }
}

use std::any::Any;
use std::collections::BTreeMap;

use super::{action_mask, generate_demand, read_trace, step_reward, ClusterState, DemandModel, VmRequest};
use crate::config::EnvConfig;
use crate::env::{Action, ActionSpace, Environment, Observation, ObservationSpace, SeedCounter, StepResult};
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub enum DemandSource {
    Synthetic(DemandModel),
    /// The same recorded requests every episode.
    Trace(Vec<VmRequest>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VmPackingConfig {
    pub pm_count: usize,
    pub steps: usize,
    pub overload_penalty: f64,
    pub demand: DemandSource,
}

impl Default for VmPackingConfig {
    fn default() -> Self {
        Self { pm_count: 50, steps: 72, overload_penalty: -1000.0, demand: DemandSource::Synthetic(DemandModel::default()) }
    }
}

impl VmPackingConfig {
    pub const KEYS: [&'static str; 8] = [
        "pm_count",
        "steps",
        "overload_penalty",
        "cpu_mean",
        "mem_mean",
        "concentration",
        "mean_duration",
        "trace",
    ];

    /// Keys as in [`VmPackingConfig::KEYS`]; `mean_duration` enables
    /// geometric lifetimes, `trace` replaces the generator with a CSV file.
    pub fn from_config(id: &str, cfg: &EnvConfig) -> Result<Self> {
        let r = cfg.reader(id, &Self::KEYS)?;
        let d = Self::default();
        let demand = match r.text("trace")? {
            Some(path) => DemandSource::Trace(read_trace(std::fs::File::open(&path)?)?),
            None => {
                let m = DemandModel::default();
                DemandSource::Synthetic(DemandModel {
                    cpu_mean: r.f64("cpu_mean")?.unwrap_or(m.cpu_mean),
                    mem_mean: r.f64("mem_mean")?.unwrap_or(m.mem_mean),
                    concentration: r.f64("concentration")?.unwrap_or(m.concentration),
                    mean_duration: r.f64("mean_duration")?,
                })
            }
        };
        let c = Self {
            pm_count: r.usize("pm_count")?.unwrap_or(d.pm_count),
            steps: r.usize("steps")?.unwrap_or(d.steps),
            overload_penalty: r.f64("overload_penalty")?.unwrap_or(d.overload_penalty),
            demand,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pm_count == 0 || self.steps == 0 {
            return Err(Error::config("pm_count and steps must be at least 1"));
        }
        // Slack per step is at least -2 per machine, so this stays below
        // anything a feasible step can earn.
        if !(self.overload_penalty < -2.0 * self.pm_count as f64) {
            return Err(Error::config(format!(
                "overload_penalty {} must be below -2 x pm_count",
                self.overload_penalty
            )));
        }
        match &self.demand {
            DemandSource::Synthetic(m) => m.validate(),
            DemandSource::Trace(t) if t.len() < self.steps => {
                Err(Error::config(format!("trace has {} requests, episode needs {}", t.len(), self.steps)))
            }
            DemandSource::Trace(_) => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
struct Episode {
    cluster: ClusterState,
    requests: Vec<VmRequest>,
    /// Running VMs as (machine, cpu, mem, departure step).
    running: Vec<(usize, f64, f64, Option<usize>)>,
    done: bool,
}

/// Online VM placement.
///
/// Observation: `[open_0..open_{n-1}, cpu_0.., mem_0.., req_cpu, req_mem]`.
/// Action: machine index. The unmasked variant ends the episode with the
/// overload penalty when the chosen machine cannot host the request; the
/// masked variant rejects such actions and ends with reward 0 if no
/// machine can host it.
#[derive(Clone, Debug)]
pub struct VmPackingEnv {
    config: VmPackingConfig,
    masked: bool,
    seeds: SeedCounter,
    episode: Option<Episode>,
}

impl VmPackingEnv {
    pub fn new(config: VmPackingConfig, masked: bool, seed: Option<u64>) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, masked, seeds: SeedCounter::new(seed), episode: None })
    }

    pub fn config(&self) -> &VmPackingConfig {
        &self.config
    }

    pub fn cluster(&self) -> Option<&ClusterState> {
        self.episode.as_ref().map(|e| &e.cluster)
    }

    /// The request waiting for placement, if the episode is running.
    pub fn pending(&self) -> Option<&VmRequest> {
        let ep = self.episode.as_ref()?;
        if ep.done {
            None
        } else {
            ep.requests.get(ep.cluster.step)
        }
    }

    fn observe(&self) -> Observation {
        let ep = self.episode.as_ref().expect("observe after reset");
        let c = &ep.cluster;
        let n = c.len();
        let mut v = Vec::with_capacity(3 * n + 2);
        v.extend((0..n).map(|p| if c.is_open(p) { 1.0 } else { 0.0 }));
        v.extend_from_slice(&c.cpu);
        v.extend_from_slice(&c.mem);
        let pending = self.pending();
        v.push(pending.map_or(0.0, |r| r.cpu));
        v.push(pending.map_or(0.0, |r| r.mem));
        match (self.masked, pending) {
            (true, Some(r)) => Observation::with_mask(v, action_mask(c, r)),
            (true, None) => Observation::with_mask(v, vec![false; n]),
            (false, _) => Observation::new(v),
        }
    }
}

impl Environment for VmPackingEnv {
    fn id(&self) -> &'static str {
        if self.masked {
            "vm-packing-masked"
        } else {
            "vm-packing"
        }
    }

    fn observation_space(&self) -> ObservationSpace {
        let size = 3 * self.config.pm_count + 2;
        ObservationSpace { low: vec![0.0; size], high: vec![1.0; size] }
    }

    fn action_space(&self) -> ActionSpace {
        ActionSpace::Discrete { n: self.config.pm_count }
    }

    fn max_steps(&self) -> usize {
        self.config.steps
    }

    fn reset(&mut self, seed: Option<u64>) -> Result<Observation> {
        let seed = self.seeds.next(seed);
        let requests = match &self.config.demand {
            DemandSource::Synthetic(m) => generate_demand(&mut RngStream::new(seed, "vm/demand"), m, self.config.steps),
            DemandSource::Trace(t) => t[..self.config.steps].to_vec(),
        };
        self.episode = Some(Episode {
            cluster: ClusterState::new(self.config.pm_count),
            requests,
            running: Vec::new(),
            done: false,
        });
        Ok(self.observe())
    }

    fn step(&mut self, action: &Action) -> Result<StepResult> {
        self.action_space().check(action)?;
        let Action::Discrete(pm) = *action else { unreachable!("checked against a discrete space") };
        let masked = self.masked;
        let penalty = self.config.overload_penalty;
        let steps = self.config.steps;
        let ep = self.episode.as_mut().ok_or(Error::NotReset)?;
        if ep.done {
            return Err(Error::EpisodeDone);
        }
        let req = ep.requests[ep.cluster.step].clone();
        let mut info = BTreeMap::new();

        if !ep.cluster.fits(pm, &req) {
            let none_fit = !(0..ep.cluster.len()).any(|p| ep.cluster.fits(p, &req));
            let reward = if masked && none_fit {
                info.insert("no_feasible_pm".to_string(), 1.0);
                0.0
            } else if masked {
                return Err(Error::domain(format!("machine {pm} is masked off for this request")));
            } else {
                info.insert("overload".to_string(), 1.0);
                penalty
            };
            ep.done = true;
            return Ok(StepResult { observation: self.observe(), reward, done: true, info });
        }

        ep.cluster.place(pm, &req);
        let t = ep.cluster.step;
        ep.running.push((pm, req.cpu, req.mem, req.duration.map(|d| t + d)));
        let reward = step_reward(&ep.cluster);

        ep.cluster.step += 1;
        let now = ep.cluster.step;
        let cluster = &mut ep.cluster;
        ep.running.retain(|&(p, c, m, leave)| {
            let gone = leave.is_some_and(|l| l <= now);
            if gone {
                cluster.remove(p, c, m);
            }
            !gone
        });
        ep.done = now >= steps;
        let done = ep.done;
        info.insert("open_pms".to_string(), (0..ep.cluster.len()).filter(|&p| ep.cluster.is_open(p)).count() as f64);
        Ok(StepResult { observation: self.observe(), reward, done, info })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

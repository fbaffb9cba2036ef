use super::VmRequest;
use crate::error::{Error, Result};

/// Slack allowed in fit checks so sums like 0.3 + 0.7 still count as full.
pub const FIT_TOL: f64 = 1e-9;

/// Per-machine loads (capacity normalized to 1 in each dimension).
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterState {
    pub cpu: Vec<f64>,
    pub mem: Vec<f64>,
    /// Number of VMs hosted; a machine is open iff this is nonzero.
    pub hosted: Vec<usize>,
    pub step: usize,
}

impl ClusterState {
    pub fn new(pms: usize) -> Self {
        Self { cpu: vec![0.0; pms], mem: vec![0.0; pms], hosted: vec![0; pms], step: 0 }
    }

    /// Machines with the given loads, each holding one VM if its load is nonzero.
    pub fn with_loads(loads: &[(f64, f64)]) -> Self {
        let mut s = Self::new(loads.len());
        for (p, &(c, m)) in loads.iter().enumerate() {
            s.cpu[p] = c;
            s.mem[p] = m;
            s.hosted[p] = usize::from(c > 0.0 || m > 0.0);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.cpu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cpu.is_empty()
    }

    pub fn is_open(&self, pm: usize) -> bool {
        self.hosted[pm] > 0
    }

    pub fn fits(&self, pm: usize, request: &VmRequest) -> bool {
        self.cpu[pm] + request.cpu <= 1.0 + FIT_TOL && self.mem[pm] + request.mem <= 1.0 + FIT_TOL
    }

    pub fn place(&mut self, pm: usize, request: &VmRequest) {
        self.cpu[pm] = (self.cpu[pm] + request.cpu).min(1.0);
        self.mem[pm] = (self.mem[pm] + request.mem).min(1.0);
        self.hosted[pm] += 1;
    }

    pub fn remove(&mut self, pm: usize, cpu: f64, mem: f64) {
        self.hosted[pm] -= 1;
        if self.hosted[pm] == 0 {
            self.cpu[pm] = 0.0;
            self.mem[pm] = 0.0;
        } else {
            self.cpu[pm] = (self.cpu[pm] - cpu).max(0.0);
            self.mem[pm] = (self.mem[pm] - mem).max(0.0);
        }
    }
}

/// Negative total slack of the open machines: sum of (cpu + mem - 2).
pub fn step_reward(state: &ClusterState) -> f64 {
    (0..state.len())
        .filter(|&p| state.is_open(p))
        .map(|p| state.cpu[p] + state.mem[p] - 2.0)
        .sum()
}

/// Machines that can take `request` without exceeding capacity.
pub fn action_mask(state: &ClusterState, request: &VmRequest) -> Vec<bool> {
    (0..state.len()).map(|p| state.fits(p, request)).collect()
}

/// Lowest-index open machine that fits, else the lowest-index closed one.
pub fn first_fit_policy(state: &ClusterState, request: &VmRequest) -> Result<usize> {
    (0..state.len())
        .find(|&p| state.is_open(p) && state.fits(p, request))
        .or_else(|| (0..state.len()).find(|&p| !state.is_open(p) && state.fits(p, request)))
        .ok_or_else(|| {
            Error::Placement(format!(
                "no machine can host request (cpu {}, mem {}) at step {}",
                request.cpu, request.mem, state.step
            ))
        })
}

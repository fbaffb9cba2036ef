use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::SupplyChainConfig;
use crate::error::{Error, Result};

/// On-hand inventory, orders in transit, backlog and the period counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupplyChainState {
    pub period: usize,
    pub on_hand: Vec<u64>,
    /// `pipeline[m][j]` arrives at stage `m` at the start of period `period + j`;
    /// each queue holds exactly `lead_time[m]` entries.
    pub pipeline: Vec<VecDeque<u64>>,
    /// `backlog[0]` is unmet customer demand; `backlog[m]` for `m >= 1` is
    /// the part of stage `m - 1`'s order that stage `m` could not ship.
    pub backlog: Vec<u64>,
}

impl SupplyChainState {
    pub fn initial(config: &SupplyChainConfig) -> Self {
        Self {
            period: 0,
            on_hand: config.initial_inventory.clone(),
            pipeline: config.lead_time.iter().map(|&l| VecDeque::from(vec![0; l])).collect(),
            backlog: vec![0; config.stages() + 1],
        }
    }

    /// Units in transit to stage `m`.
    pub fn in_transit(&self, m: usize) -> u64 {
        self.pipeline[m].iter().sum()
    }

    /// Length of [`SupplyChainState::to_observation`] for `config`.
    pub fn observation_size(config: &SupplyChainConfig) -> usize {
        let m = config.stages();
        m + m * config.max_lead_time() + m + 1 + 1
    }

    /// `[I_0..I_{M-1}, pipeline slots, B_0..B_M, t]`, with `max(L)` pipeline
    /// slots per stage in arrival order and zero padding.
    pub fn to_observation(&self, config: &SupplyChainConfig) -> Vec<f64> {
        let width = config.max_lead_time();
        let mut v = Vec::with_capacity(Self::observation_size(config));
        v.extend(self.on_hand.iter().map(|&x| x as f64));
        for q in &self.pipeline {
            v.extend(q.iter().map(|&x| x as f64));
            v.extend(std::iter::repeat(0.0).take(width - q.len()));
        }
        v.extend(self.backlog.iter().map(|&x| x as f64));
        v.push(self.period as f64);
        v
    }

    pub fn from_observation(values: &[f64], config: &SupplyChainConfig) -> Result<Self> {
        if values.len() != Self::observation_size(config) {
            return Err(Error::domain(format!(
                "observation length {} does not match this supply chain ({})",
                values.len(),
                Self::observation_size(config)
            )));
        }
        let m = config.stages();
        let width = config.max_lead_time();
        let int = |x: f64| x.max(0.0).round() as u64;
        let on_hand = values[..m].iter().map(|&x| int(x)).collect();
        let pipeline = (0..m)
            .map(|s| {
                let start = m + s * width;
                values[start..start + config.lead_time[s]].iter().map(|&x| int(x)).collect()
            })
            .collect();
        let b0 = m + m * width;
        let backlog = values[b0..b0 + m + 1].iter().map(|&x| int(x)).collect();
        Ok(Self { period: int(values[b0 + m + 1]) as usize, on_hand, pipeline, backlog })
    }
}

/// Everything that happened in one period.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionOutcome {
    pub state: SupplyChainState,
    /// Order quantity actually placed by stage `m` (carried backlog included).
    pub accepted: Vec<u64>,
    /// Units sold by each stage `0..=M`.
    pub sales: Vec<u64>,
    pub unfulfilled: Vec<u64>,
    pub arrivals: Vec<u64>,
    /// Discounted profit of each stage `0..=M`.
    pub profit: Vec<f64>,
}

impl TransitionOutcome {
    pub fn total_profit(&self) -> f64 {
        self.profit.iter().sum()
    }
}

/// Advances one period.
///
/// Order of events: stage `m` orders `requested[m]` (plus its carried
/// unfilled order when backlogging), limited by capacity and by what stage
/// `m + 1` has on hand; orders placed `L_m` periods ago arrive; the retailer
/// serves demand plus backlog from on-hand stock; upstream stages ship the
/// accepted orders. Unmet quantities are backlogged or lost.
pub fn transition(
    config: &SupplyChainConfig,
    state: &SupplyChainState,
    requested: &[u64],
    demand: u64,
) -> TransitionOutcome {
    let m_count = config.stages();
    assert_eq!(requested.len(), m_count, "one request per stage");
    let mut next = state.clone();

    let wanted: Vec<u64> = (0..m_count)
        .map(|m| requested[m] + if config.backlog { state.backlog[m + 1] } else { 0 })
        .collect();
    let accepted: Vec<u64> = (0..m_count)
        .map(|m| {
            let supply = if m + 1 < m_count { state.on_hand[m + 1] } else { u64::MAX };
            wanted[m].min(config.capacity[m]).min(supply)
        })
        .collect();

    let mut arrivals = vec![0; m_count];
    for m in 0..m_count {
        next.pipeline[m].push_back(accepted[m]);
        arrivals[m] = next.pipeline[m].pop_front().expect("queue holds lead_time + 1 entries");
        next.on_hand[m] += arrivals[m];
    }

    let owed = demand + if config.backlog { state.backlog[0] } else { 0 };
    let mut sales = vec![0; m_count + 1];
    sales[0] = next.on_hand[0].min(owed);
    sales[1..].copy_from_slice(&accepted);
    for m in 0..m_count {
        next.on_hand[m] -= sales[m];
    }

    let mut unfulfilled = vec![owed - sales[0]];
    unfulfilled.extend((0..m_count).map(|m| wanted[m] - accepted[m]));
    next.backlog = if config.backlog { unfulfilled.clone() } else { vec![0; m_count + 1] };

    let scale = config.discount.powi(state.period as i32);
    let profit = (0..=m_count)
        .map(|m| {
            let bought = if m < m_count { accepted[m] } else { sales[m] };
            let held = if m < m_count { next.on_hand[m] as f64 * config.holding_cost[m] } else { 0.0 };
            scale
                * (config.unit_price[m] * sales[m] as f64
                    - config.unit_cost[m] * bought as f64
                    - config.backlog_cost[m] * unfulfilled[m] as f64
                    - held)
        })
        .collect();

    next.period += 1;
    TransitionOutcome { state: next, accepted, sales, unfulfilled, arrivals, profit }
}

/// One demand path of `config.periods` Poisson draws.
pub fn sample_demand_path<R: Rng + ?Sized>(config: &SupplyChainConfig, rng: &mut R) -> Vec<u64> {
    if config.demand_mean == 0.0 {
        return vec![0; config.periods];
    }
    let law = Poisson::new(config.demand_mean).expect("validated mean");
    (0..config.periods).map(|_| law.sample(rng) as u64).collect()
}

/// Writes one comma-separated row per path.
pub fn write_demand_paths<W: Write>(mut out: W, paths: &[Vec<u64>]) -> Result<()> {
    for p in paths {
        let row: Vec<String> = p.iter().map(|d| d.to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_demand_paths<R: BufRead>(input: R) -> Result<Vec<Vec<u64>>> {
    let mut paths = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| Error::parse(i + 1, format!("bad demand '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        paths.push(row);
    }
    Ok(paths)
}

use orbench_lp::{solve, Direction, LpProblem, LpSolution, Sense, SolveOptions};

use super::{SupplyChainConfig, SupplyChainState};
use crate::env::{Action, Observation, Policy};
use crate::error::{Error, Result};

/// Deterministic planning LP from `state.period` to the horizon.
///
/// Per planning period `τ`, variables are the orders `R[τ,m] ∈ [0, c_m]`,
/// retailer sales `S[τ]`, end-of-period inventory `I[τ,m]` and retailer
/// shortfall `U[τ]` (carried as backlog when backlogging). Rows: material
/// balance per stage, demand balance at the retailer, and orders bounded by
/// the supplier's start-of-period inventory.
#[derive(Clone, Debug)]
pub struct PlanLp {
    pub problem: LpProblem,
    start: usize,
    horizon: usize,
    stages: usize,
}

impl PlanLp {
    pub fn build(config: &SupplyChainConfig, state: &SupplyChainState, forecast: &[f64]) -> Result<Self> {
        let m_count = config.stages();
        let start = state.period;
        if start >= config.periods {
            return Err(Error::config(format!("period {start} is past the horizon {}", config.periods)));
        }
        let horizon = config.periods - start;
        if forecast.len() != horizon {
            return Err(Error::config(format!("forecast covers {} periods, expected {horizon}", forecast.len())));
        }
        let lp = Self { problem: LpProblem::new(Direction::Maximize, Vec::new()), start, horizon, stages: m_count };
        let n = lp.num_vars();
        let mut obj = vec![0.0; n];
        for tau in 0..horizon {
            let disc = config.discount.powi((start + tau) as i32);
            obj[lp.sales(tau)] += disc * config.unit_price[0];
            for m in 0..m_count {
                obj[lp.order(tau, m)] += disc * (config.unit_price[m + 1] - config.unit_cost[m]);
                obj[lp.stock(tau, m)] -= disc * config.holding_cost[m];
            }
            obj[lp.order(tau, m_count - 1)] -= disc * config.unit_cost[m_count];
            obj[lp.short(tau)] -= disc * config.backlog_cost[0];
        }
        let mut p = LpProblem::new(Direction::Maximize, obj);
        for tau in 0..horizon {
            for m in 0..m_count {
                p.set_bounds(lp.order(tau, m), 0.0, config.capacity[m] as f64);
            }
        }

        for tau in 0..horizon {
            for m in 0..m_count {
                let mut terms = vec![(lp.stock(tau, m), 1.0)];
                let mut rhs = 0.0;
                if tau == 0 {
                    rhs += state.on_hand[m] as f64;
                } else {
                    terms.push((lp.stock(tau - 1, m), -1.0));
                }
                let lead = config.lead_time[m];
                if tau >= lead {
                    terms.push((lp.order(tau - lead, m), -1.0));
                } else {
                    rhs += state.pipeline[m][tau] as f64;
                }
                terms.push(if m == 0 { (lp.sales(tau), 1.0) } else { (lp.order(tau, m - 1), 1.0) });
                p.add_sparse_row(&terms, Sense::Eq, rhs);
            }

            let mut terms = vec![(lp.short(tau), 1.0), (lp.sales(tau), 1.0)];
            let mut rhs = forecast[tau];
            if config.backlog {
                if tau == 0 {
                    rhs += state.backlog[0] as f64;
                } else {
                    terms.push((lp.short(tau - 1), -1.0));
                }
            }
            p.add_sparse_row(&terms, Sense::Eq, rhs);

            for m in 0..m_count.saturating_sub(1) {
                if tau == 0 {
                    p.add_sparse_row(&[(lp.order(0, m), 1.0)], Sense::Le, state.on_hand[m + 1] as f64);
                } else {
                    p.add_sparse_row(&[(lp.order(tau, m), 1.0), (lp.stock(tau - 1, m + 1), -1.0)], Sense::Le, 0.0);
                }
            }
        }
        p.set_names(lp.names());
        Ok(Self { problem: p, ..lp })
    }

    fn num_vars(&self) -> usize {
        self.horizon * (2 * self.stages + 2)
    }

    pub fn order(&self, tau: usize, m: usize) -> usize {
        tau * self.stages + m
    }

    fn sales(&self, tau: usize) -> usize {
        self.horizon * self.stages + tau
    }

    fn stock(&self, tau: usize, m: usize) -> usize {
        self.horizon * (self.stages + 1) + tau * self.stages + m
    }

    fn short(&self, tau: usize) -> usize {
        self.horizon * (2 * self.stages + 1) + tau
    }

    fn names(&self) -> Vec<String> {
        let mut names = vec![String::new(); self.num_vars()];
        for tau in 0..self.horizon {
            let t = self.start + tau;
            for m in 0..self.stages {
                names[self.order(tau, m)] = format!("R_{t}_{m}");
                names[self.stock(tau, m)] = format!("I_{}_{m}", t + 1);
            }
            names[self.sales(tau)] = format!("S_{t}");
            names[self.short(tau)] = format!("U_{t}");
        }
        names
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let sol = solve(&self.problem, &SolveOptions::default())?;
        if !sol.is_optimal() {
            return Err(Error::LpFailed { status: sol.status, dump: self.problem.to_string() });
        }
        Ok(sol)
    }

    /// Orders `R[τ][m]` of a solution, one row per planning period.
    pub fn orders(&self, sol: &LpSolution) -> Vec<Vec<f64>> {
        (0..self.horizon).map(|tau| (0..self.stages).map(|m| sol.x[self.order(tau, m)]).collect()).collect()
    }
}

/// Period-`t` orders of the shrinking-horizon LP with every remaining
/// period's demand at `expected_demand`.
///
/// The LP order is rounded and reduced by any unfilled order the
/// environment will add back, so the quantity actually placed matches it.
pub fn shlp_action(state: &SupplyChainState, expected_demand: f64, config: &SupplyChainConfig) -> Result<Vec<u64>> {
    let horizon = config.periods.saturating_sub(state.period);
    let lp = PlanLp::build(config, state, &vec![expected_demand; horizon])?;
    let sol = lp.solve()?;
    Ok((0..config.stages())
        .map(|m| {
            let r = (sol.x[lp.order(0, m)].round().max(0.0) as u64).min(config.capacity[m]);
            if config.backlog {
                r.saturating_sub(state.backlog[m + 1])
            } else {
                r
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OraclePlan {
    /// Optimal LP profit on the realized path.
    pub value: f64,
    /// Orders per period and stage.
    pub plan: Vec<Vec<f64>>,
}

/// Perfect-information LP over the whole horizon.
pub fn oracle_value(demand: &[u64], config: &SupplyChainConfig) -> Result<OraclePlan> {
    let forecast: Vec<f64> = demand.iter().map(|&d| d as f64).collect();
    let lp = PlanLp::build(config, &SupplyChainState::initial(config), &forecast)?;
    let sol = lp.solve()?;
    Ok(OraclePlan { value: sol.objective, plan: lp.orders(&sol) })
}

/// Shrinking-horizon LP policy over the inventory observation layout.
pub struct ShlpPolicy {
    config: SupplyChainConfig,
}

impl ShlpPolicy {
    pub fn new(config: SupplyChainConfig) -> Self {
        Self { config }
    }
}

impl Policy for ShlpPolicy {
    fn act(&mut self, obs: &Observation) -> Result<Action> {
        let state = SupplyChainState::from_observation(&obs.values, &self.config)?;
        let r = shlp_action(&state, self.config.demand_mean, &self.config)?;
        Ok(Action::Integers(r.into_iter().map(|x| x as i64).collect()))
    }
}

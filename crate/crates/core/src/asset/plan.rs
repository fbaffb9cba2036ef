use std::io::{Read, Write};

use orbench_lp::{solve, Direction, LpProblem, LpStatus, Sense, SolveOptions};
use rayon::prelude::*;

use super::{apply_trades, sample_prices, MpaaConfig, PortfolioState};
use crate::env::{Action, Observation, Policy};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Buy and sell quantities per period and asset; at most one of the two is
/// nonzero for any entry.
#[derive(Clone, Debug, PartialEq)]
pub struct TradePlan {
    pub buys: Vec<Vec<f64>>,
    pub sells: Vec<Vec<f64>>,
}

impl TradePlan {
    pub fn zero(horizon: usize, assets: usize) -> Self {
        Self { buys: vec![vec![0.0; assets]; horizon], sells: vec![vec![0.0; assets]; horizon] }
    }

    pub fn horizon(&self) -> usize {
        self.buys.len()
    }

    /// Signed trades `b - s` of period `l`.
    pub fn delta(&self, l: usize) -> Vec<f64> {
        self.buys[l].iter().zip(&self.sells[l]).map(|(b, s)| b - s).collect()
    }

    /// Builds a plan from signed trades, one row per period.
    pub fn from_deltas(deltas: &[Vec<f64>]) -> Self {
        Self {
            buys: deltas.iter().map(|r| r.iter().map(|d| d.max(0.0)).collect()).collect(),
            sells: deltas.iter().map(|r| r.iter().map(|d| (-d).max(0.0)).collect()).collect(),
        }
    }

    /// Writes `period,asset,buy,sell` rows; assets are numbered from 1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["period", "asset", "buy", "sell"]).map_err(csv_error)?;
        for l in 0..self.horizon() {
            for i in 0..self.buys[l].len() {
                w.write_record([l.to_string(), (i + 1).to_string(), self.buys[l][i].to_string(), self.sells[l][i].to_string()])
                    .map_err(csv_error)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, horizon: usize, assets: usize) -> Result<Self> {
        let mut plan = Self::zero(horizon, assets);
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let header: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
        if header != ["period", "asset", "buy", "sell"] {
            return Err(Error::parse(1, format!("expected header period,asset,buy,sell, got {}", header.join(","))));
        }
        for (k, rec) in rdr.records().enumerate() {
            let line = k + 2;
            let rec = rec.map_err(csv_error)?;
            let num = |j: usize| -> Result<f64> {
                let s = rec.get(j).unwrap_or("");
                s.parse::<f64>().map_err(|_| Error::parse(line, format!("bad number '{s}'")))
            };
            let (l, i, b, s) = (num(0)?, num(1)?, num(2)?, num(3)?);
            if l.fract() != 0.0 || l < 0.0 || l as usize >= horizon || i.fract() != 0.0 || i < 1.0 || i as usize > assets {
                return Err(Error::parse(line, format!("period {l} / asset {i} out of range")));
            }
            if !(b >= 0.0 && s >= 0.0) || (b > 0.0 && s > 0.0) {
                return Err(Error::parse(line, "buy and sell must be nonnegative and not both positive"));
            }
            plan.buys[l as usize][i as usize - 1] = b;
            plan.sells[l as usize][i as usize - 1] = s;
        }
        Ok(plan)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::parse(e.position().map_or(0, |p| p.line() as usize), e.to_string())
}

/// Optimal plan when prices equal their means, and its final wealth.
///
/// Variables per period `l` and asset `i`: buys, sells, post-trade holdings,
/// and post-trade cash. Cash and holdings balances are equalities.
pub fn deterministic_plan(config: &MpaaConfig) -> Result<(TradePlan, f64)> {
    config.validate()?;
    let (n, horizon) = (config.assets, config.horizon);
    let per = 3 * n + 1;
    let buy = |l: usize, i: usize| l * per + i;
    let sell = |l: usize, i: usize| l * per + n + i;
    let hold = |l: usize, i: usize| l * per + 2 * n + i;
    let cash = |l: usize| l * per + 3 * n;

    let mut obj = vec![0.0; horizon * per];
    obj[cash(horizon - 1)] = 1.0;
    for i in 0..n {
        obj[hold(horizon - 1, i)] = config.price_mean[horizon][i];
    }
    let mut p = LpProblem::new(Direction::Maximize, obj);
    for l in 0..horizon {
        for i in 0..n {
            p.set_bounds(buy(l, i), 0.0, config.trade_bound);
            p.set_bounds(sell(l, i), 0.0, config.trade_bound);
        }
        let price = &config.price_mean[l];
        let mut terms = vec![(cash(l), 1.0)];
        let rhs = if l == 0 {
            config.initial_cash
        } else {
            terms.push((cash(l - 1), -1.0));
            0.0
        };
        for i in 0..n {
            terms.push((sell(l, i), -(1.0 - config.sale_cost[l][i]) * price[i]));
            terms.push((buy(l, i), (1.0 + config.purchase_cost[l][i]) * price[i]));
        }
        p.add_sparse_row(&terms, Sense::Eq, rhs);
        for i in 0..n {
            let mut terms = vec![(hold(l, i), 1.0), (buy(l, i), -1.0), (sell(l, i), 1.0)];
            let rhs = if l == 0 {
                config.initial_holdings[i]
            } else {
                terms.push((hold(l - 1, i), -1.0));
                0.0
            };
            p.add_sparse_row(&terms, Sense::Eq, rhs);
        }
    }
    let sol = solve(&p, &SolveOptions::default())?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => {
            return Err(Error::config("configured prices admit unbounded arbitrage"));
        }
        status => return Err(Error::LpFailed { status, dump: p.to_string() }),
    }
    let deltas: Vec<Vec<f64>> =
        (0..horizon).map(|l| (0..n).map(|i| sol.x[buy(l, i)] - sol.x[sell(l, i)]).collect()).collect();
    Ok((TradePlan::from_deltas(&deltas), sol.objective))
}

/// Final wealth of replaying `plan` on one price path.
pub fn simulate_plan(plan: &TradePlan, config: &MpaaConfig, prices: &[Vec<f64>]) -> f64 {
    let mut s = PortfolioState {
        period: 0,
        cash: config.initial_cash,
        holdings: config.initial_holdings.clone(),
        prices: prices[0].clone(),
    };
    for l in 0..config.horizon {
        s = apply_trades(&s, &plan.delta(l), &config.sale_cost[l], &config.purchase_cost[l]).state;
        s.period = l + 1;
        s.prices = prices[l + 1].clone();
    }
    s.wealth()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges from the minimum to the maximum.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WealthStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Histogram,
    pub samples: Vec<f64>,
}

const HISTOGRAM_BINS: usize = 20;

/// Replays `plan` on `scenarios` sampled price paths. Scenario `k` draws
/// from substream `k` of `stream`, so results do not depend on threading.
pub fn evaluate_plan(plan: &TradePlan, config: &MpaaConfig, scenarios: usize, stream: &RngStream) -> WealthStats {
    let samples: Vec<f64> = (0..scenarios)
        .into_par_iter()
        .map(|k| {
            let prices = sample_prices(config, &mut stream.substream(&k.to_string()));
            simulate_plan(plan, config, &prices)
        })
        .collect();
    summarize(samples)
}

fn summarize(samples: Vec<f64>) -> WealthStats {
    let n = samples.len().max(1) as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let std = (samples.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n).sqrt();
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / HISTOGRAM_BINS as f64;
    let edges = (0..=HISTOGRAM_BINS).map(|b| min + width * b as f64).collect();
    let mut counts = vec![0; HISTOGRAM_BINS];
    for &w in &samples {
        let b = if width > 0.0 { (((w - min) / width) as usize).min(HISTOGRAM_BINS - 1) } else { 0 };
        counts[b] += 1;
    }
    WealthStats { mean, std, min, max, histogram: Histogram { edges, counts }, samples }
}

/// Replays a fixed plan, reading the period from the observation.
pub struct PlanPolicy {
    plan: TradePlan,
}

impl PlanPolicy {
    pub fn new(plan: TradePlan) -> Self {
        Self { plan }
    }
}

impl Policy for PlanPolicy {
    fn act(&mut self, obs: &Observation) -> Result<Action> {
        let l = obs.values.first().copied().unwrap_or(0.0) as usize;
        if l >= self.plan.horizon() {
            return Err(Error::domain(format!("plan has no trades for period {l}")));
        }
        Ok(Action::Reals(self.plan.delta(l)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_prices_mean_no_trades() {
        let c = MpaaConfig::synthetic(3, 5, &[1.0, 2.0, 4.0], 0.0, 0.0, 0.01, 0.01);
        let (plan, wealth) = deterministic_plan(&c).unwrap();
        assert!((wealth - 100.0).abs() < 1e-9);
        assert!(plan.buys.iter().chain(&plan.sells).flatten().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn doubling_asset_compounds() {
        let c = MpaaConfig::synthetic(1, 6, &[1.0], 1.0, 0.0, 0.0, 0.0);
        let (plan, wealth) = deterministic_plan(&c).unwrap();
        assert!((wealth - 100.0 * 64.0).abs() < 1e-6, "{wealth}");
        assert!((plan.buys[0][0] - 100.0).abs() < 1e-9);
        assert!((simulate_plan(&plan, &c, &c.price_mean) - wealth).abs() < 1e-6);
    }

    #[test]
    fn zero_plan_statistics() {
        let c = MpaaConfig::default();
        let s = evaluate_plan(&TradePlan::zero(10, 3), &c, 50, &RngStream::new(1, "eval"));
        assert_eq!(s.mean, 100.0);
        assert_eq!(s.std, 0.0);
        assert_eq!(s.histogram.counts.iter().sum::<usize>(), 50);
    }

    #[test]
    fn csv_round_trip() {
        let plan = TradePlan::from_deltas(&[vec![1.5, -0.25], vec![0.0, 3.0]]);
        let mut buf = Vec::new();
        plan.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("period,asset,buy,sell\n0,1,1.5,0\n0,2,0,0.25\n"));
        assert_eq!(TradePlan::read_csv(&buf[..], 2, 2).unwrap(), plan);
        assert!(TradePlan::read_csv("period,asset,buy,sell\n0,1,1,1\n".as_bytes(), 2, 2).is_err());
        assert!(TradePlan::read_csv("period,asset,buy,sell\n0,3,1,0\n".as_bytes(), 2, 2).is_err());
    }
}

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::MpaaConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct PortfolioState {
    pub period: usize,
    pub cash: f64,
    pub holdings: Vec<f64>,
    pub prices: Vec<f64>,
}

impl PortfolioState {
    pub fn wealth(&self) -> f64 {
        self.cash + self.holdings.iter().zip(&self.prices).map(|(x, p)| x * p).sum::<f64>()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TradeOutcome {
    pub state: PortfolioState,
    pub sold: Vec<f64>,
    pub bought: Vec<f64>,
    /// Fraction of the requested buys that was affordable (1 when all were).
    pub buy_scale: f64,
    /// Number of sells cut back to the available holdings.
    pub sells_capped: usize,
}

/// Executes signed trades at the state's prices.
///
/// Sells (`delta < 0`) go first, capped at the holdings, crediting
/// `(1 - sale_cost) P s`. Buys then cost `(1 + purchase_cost) P b` and are
/// scaled down together if they exceed the cash on hand.
pub fn apply_trades(state: &PortfolioState, delta: &[f64], sale_cost: &[f64], purchase_cost: &[f64]) -> TradeOutcome {
    let n = state.holdings.len();
    assert_eq!(delta.len(), n, "one trade per asset");
    let mut next = state.clone();
    let mut sold = vec![0.0; n];
    let mut sells_capped = 0;
    for i in 0..n {
        if delta[i] < 0.0 {
            let want = -delta[i];
            let s = want.min(next.holdings[i]);
            if s < want {
                sells_capped += 1;
            }
            sold[i] = s;
            next.holdings[i] -= s;
            next.cash += (1.0 - sale_cost[i]) * state.prices[i] * s;
        }
    }
    let cost: f64 =
        (0..n).filter(|&i| delta[i] > 0.0).map(|i| (1.0 + purchase_cost[i]) * state.prices[i] * delta[i]).sum();
    let buy_scale = if cost > next.cash { (next.cash / cost).max(0.0) } else { 1.0 };
    let mut bought = vec![0.0; n];
    let mut spent = 0.0;
    for i in 0..n {
        if delta[i] > 0.0 {
            bought[i] = delta[i] * buy_scale;
            next.holdings[i] += bought[i];
            spent += (1.0 + purchase_cost[i]) * state.prices[i] * bought[i];
        }
    }
    next.cash = (next.cash - spent).max(0.0);
    TradeOutcome { state: next, sold, bought, buy_scale, sells_capped }
}

/// Prices for periods `0..=L`, Gaussian per entry and floored at `price_floor`.
pub fn sample_prices<R: Rng + ?Sized>(config: &MpaaConfig, rng: &mut R) -> Vec<Vec<f64>> {
    config
        .price_mean
        .iter()
        .zip(&config.price_std)
        .map(|(means, stds)| {
            means
                .iter()
                .zip(stds)
                .map(|(&m, &s)| {
                    let p = if s > 0.0 { Normal::new(m, s).expect("validated std").sample(rng) } else { m };
                    p.max(config.price_floor)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(cash: f64, holdings: Vec<f64>, prices: Vec<f64>) -> PortfolioState {
        PortfolioState { period: 0, cash, holdings, prices }
    }

    #[test]
    fn buy_example() {
        let out = apply_trades(&state(100.0, vec![0.0], vec![10.0]), &[5.0], &[0.0], &[0.01]);
        assert!((out.state.cash - 49.5).abs() < 1e-12);
        assert_eq!(out.state.holdings, vec![5.0]);
    }

    #[test]
    fn sell_example() {
        let out = apply_trades(&state(0.0, vec![0.0, 2.0], vec![1.0, 20.0]), &[0.0, -2.0], &[0.0, 0.01], &[0.0; 2]);
        assert!((out.state.cash - 39.6).abs() < 1e-12);
        assert_eq!(out.state.holdings, vec![0.0, 0.0]);
    }

    #[test]
    fn infeasible_requests_are_projected() {
        let s = state(10.0, vec![1.0, 0.0], vec![10.0, 5.0]);
        let out = apply_trades(&s, &[-3.0, 100.0], &[0.0; 2], &[0.0; 2]);
        assert_eq!(out.sold[0], 1.0);
        assert_eq!(out.sells_capped, 1);
        assert!((out.bought[1] - 4.0).abs() < 1e-12);
        assert!(out.buy_scale < 1.0);
        assert!(out.state.cash.abs() < 1e-12);
    }

    #[test]
    fn zero_trade_changes_nothing() {
        let s = state(50.0, vec![1.0, 2.0], vec![3.0, 4.0]);
        assert_eq!(apply_trades(&s, &[0.0, 0.0], &[0.1; 2], &[0.1; 2]).state, s);
    }
}

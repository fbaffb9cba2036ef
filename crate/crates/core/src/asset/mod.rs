//! Multi-period allocation between cash and risky assets.

mod config;
mod env;
mod plan;
mod portfolio;

pub use config::MpaaConfig;
pub use env::MpaaEnv;
pub use plan::{deterministic_plan, evaluate_plan, simulate_plan, Histogram, PlanPolicy, TradePlan, WealthStats};
pub use portfolio::{apply_trades, sample_prices, PortfolioState, TradeOutcome};

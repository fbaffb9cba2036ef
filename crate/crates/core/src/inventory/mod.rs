//! Serial multi-echelon inventory control with backlog or lost sales.

mod base_stock;
mod config;
mod dynamics;
mod env;
mod planning;

pub use base_stock::{
    base_stock_orders, base_stock_requests, optimize_base_stock, sample_path_objective, simulate_path, training_paths,
    BaseStockLevels, BaseStockPolicy, DfoOptions, DfoResult,
};
pub use config::SupplyChainConfig;
pub use dynamics::{
    read_demand_paths, sample_demand_path, transition, write_demand_paths, SupplyChainState, TransitionOutcome,
};
pub use env::InvManagementEnv;
pub use planning::{oracle_value, shlp_action, OraclePlan, PlanLp, ShlpPolicy};

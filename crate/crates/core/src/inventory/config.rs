use std::path::Path;

use crate::config::{ConfigReader, EnvConfig};
use crate::error::{Error, Result};

/// Serial supply chain: stage 0 is the retailer, stage `M` the raw-material
/// source with unlimited supply. Vectors indexed by stage have length `M`
/// (inventory, holding, lead time, capacity of the supplier of stage `m`)
/// or `M + 1` (prices, costs, backlog penalties).
#[derive(Clone, Debug, PartialEq)]
pub struct SupplyChainConfig {
    pub periods: usize,
    pub initial_inventory: Vec<u64>,
    pub unit_price: Vec<f64>,
    pub unit_cost: Vec<f64>,
    pub backlog_cost: Vec<f64>,
    pub holding_cost: Vec<f64>,
    /// `capacity[m]` bounds what stage `m` can receive per period from `m + 1`.
    pub capacity: Vec<u64>,
    pub lead_time: Vec<usize>,
    pub discount: f64,
    pub backlog: bool,
    /// Mean of the Poisson retailer demand.
    pub demand_mean: f64,
}

impl Default for SupplyChainConfig {
    fn default() -> Self {
        Self::standard()
    }
}

impl SupplyChainConfig {
    pub const KEYS: [&'static str; 11] = [
        "periods",
        "initial_inventory",
        "unit_sales_price",
        "unit_replenishment_cost",
        "unit_backlog_cost",
        "unit_holding_cost",
        "production_capacity",
        "lead_times",
        "discount",
        "demand_mean",
        "config_file",
    ];

    /// Three-stage chain with backlogging, 30 periods, Poisson(20) demand.
    pub fn standard() -> Self {
        Self {
            periods: 30,
            initial_inventory: vec![100, 100, 200],
            unit_price: vec![2.0, 1.5, 1.0, 0.75],
            unit_cost: vec![1.5, 1.0, 0.75, 0.5],
            backlog_cost: vec![0.10, 0.075, 0.05, 0.025],
            holding_cost: vec![0.15, 0.10, 0.05],
            capacity: vec![100, 90, 80],
            lead_time: vec![3, 5, 10],
            discount: 0.97,
            backlog: true,
            demand_mean: 20.0,
        }
    }

    pub fn lost_sales() -> Self {
        Self { backlog: false, ..Self::standard() }
    }

    /// Number of inventory-holding stages `M`.
    pub fn stages(&self) -> usize {
        self.initial_inventory.len()
    }

    pub fn max_lead_time(&self) -> usize {
        self.lead_time.iter().copied().max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.stages();
        if m == 0 || self.periods == 0 {
            return Err(Error::config("supply chain needs at least one stage and one period"));
        }
        let check_len = |name: &str, got: usize, want: usize| {
            if got == want {
                Ok(())
            } else {
                Err(Error::config(format!("{name} has {got} entries, expected {want}")))
            }
        };
        check_len("unit_sales_price", self.unit_price.len(), m + 1)?;
        check_len("unit_replenishment_cost", self.unit_cost.len(), m + 1)?;
        check_len("unit_backlog_cost", self.backlog_cost.len(), m + 1)?;
        check_len("unit_holding_cost", self.holding_cost.len(), m)?;
        check_len("production_capacity", self.capacity.len(), m)?;
        check_len("lead_times", self.lead_time.len(), m)?;
        let costs = self.unit_price.iter().chain(&self.unit_cost).chain(&self.backlog_cost).chain(&self.holding_cost);
        if costs.clone().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::config("prices and costs must be finite and nonnegative"));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(Error::config(format!("discount must lie in (0, 1], got {}", self.discount)));
        }
        if !(self.demand_mean.is_finite() && self.demand_mean >= 0.0) {
            return Err(Error::config("demand_mean must be nonnegative"));
        }
        Ok(())
    }

    /// Applies overrides on top of `base`. A `config_file` key loads a flat
    /// key-value file first; explicit keys win over the file.
    pub fn from_config(id: &str, base: Self, cfg: &EnvConfig) -> Result<Self> {
        let r = cfg.reader(id, &Self::KEYS)?;
        let mut out = base;
        if let Some(path) = r.text("config_file")? {
            let file = EnvConfig::from_kv_file(Path::new(&path))?;
            let keys: Vec<&str> = Self::KEYS.iter().copied().filter(|k| *k != "config_file").collect();
            out.apply(&file.reader(&path, &keys)?)?;
        }
        out.apply(&r)?;
        out.validate()?;
        Ok(out)
    }

    fn apply(&mut self, r: &ConfigReader<'_>) -> Result<()> {
        if let Some(v) = r.usize("periods")? {
            self.periods = v;
        }
        if let Some(v) = r.u64_array("initial_inventory")? {
            self.initial_inventory = v;
        }
        if let Some(v) = r.f64_array("unit_sales_price")? {
            self.unit_price = v;
        }
        if let Some(v) = r.f64_array("unit_replenishment_cost")? {
            self.unit_cost = v;
        }
        if let Some(v) = r.f64_array("unit_backlog_cost")? {
            self.backlog_cost = v;
        }
        if let Some(v) = r.f64_array("unit_holding_cost")? {
            self.holding_cost = v;
        }
        if let Some(v) = r.u64_array("production_capacity")? {
            self.capacity = v;
        }
        if let Some(v) = r.u64_array("lead_times")? {
            self.lead_time = v.into_iter().map(|x| x as usize).collect();
        }
        if let Some(v) = r.f64("discount")? {
            self.discount = v;
        }
        if let Some(v) = r.f64("demand_mean")? {
            self.demand_mean = v;
        }
        Ok(())
    }

    /// Flat key-value text accepted by `config_file`.
    pub fn to_kv_text(&self) -> String {
        let join_f = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let join_u = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let leads: Vec<u64> = self.lead_time.iter().map(|&l| l as u64).collect();
        format!(
            "periods = {}\ninitial_inventory = {}\nunit_sales_price = {}\nunit_replenishment_cost = {}\n\
             unit_backlog_cost = {}\nunit_holding_cost = {}\nproduction_capacity = {}\nlead_times = {}\n\
             discount = {}\ndemand_mean = {}\n",
            self.periods,
            join_u(&self.initial_inventory),
            join_f(&self.unit_price),
            join_f(&self.unit_cost),
            join_f(&self.backlog_cost),
            join_f(&self.holding_cost),
            join_u(&self.capacity),
            join_u(&leads),
            self.discount,
            self.demand_mean,
        )
    }
}

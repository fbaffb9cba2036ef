use std::fmt::Write as _;
use std::path::Path;

use crate::config::EnvConfig;
use crate::error::{Error, Result};

/// Cash plus `n` risky assets over `L` trading periods.
///
/// Trades at period `l` use prices `P^l`; wealth is valued at `P^L`, so the
/// price tables have `L + 1` rows and the cost tables `L` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct MpaaConfig {
    pub assets: usize,
    pub horizon: usize,
    pub initial_cash: f64,
    pub initial_holdings: Vec<f64>,
    pub price_mean: Vec<Vec<f64>>,
    pub price_std: Vec<Vec<f64>>,
    pub sale_cost: Vec<Vec<f64>>,
    pub purchase_cost: Vec<Vec<f64>>,
    pub trade_bound: f64,
    /// Sampled prices are floored here.
    pub price_floor: f64,
}

impl Default for MpaaConfig {
    fn default() -> Self {
        Self::synthetic(3, 10, &[1.0, 2.0, 4.0], 0.03, 0.05, 0.01, 0.01)
    }
}

impl MpaaConfig {
    pub const KEYS: [&'static str; 11] = [
        "assets",
        "horizon",
        "initial_cash",
        "base_price",
        "drift",
        "volatility",
        "sale_cost",
        "purchase_cost",
        "trade_bound",
        "price_floor",
        "price_file",
    ];

    /// Means growing by `drift` per period from `base`, standard deviation a
    /// fixed fraction `volatility` of the mean, constant proportional costs.
    pub fn synthetic(
        assets: usize,
        horizon: usize,
        base: &[f64],
        drift: f64,
        volatility: f64,
        sale_cost: f64,
        purchase_cost: f64,
    ) -> Self {
        let mean: Vec<Vec<f64>> = (0..=horizon)
            .map(|l| (0..assets).map(|i| base[i % base.len()] * (1.0 + drift).powi(l as i32)).collect())
            .collect();
        let std = mean.iter().map(|row| row.iter().map(|m| m * volatility).collect()).collect();
        Self {
            assets,
            horizon,
            initial_cash: 100.0,
            initial_holdings: vec![0.0; assets],
            price_mean: mean,
            price_std: std,
            sale_cost: vec![vec![sale_cost; assets]; horizon],
            purchase_cost: vec![vec![purchase_cost; assets]; horizon],
            trade_bound: 2000.0,
            price_floor: 0.01,
        }
    }

    /// Same configuration with every standard deviation set to zero.
    pub fn deterministic(&self) -> Self {
        Self { price_std: vec![vec![0.0; self.assets]; self.horizon + 1], ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let (n, l) = (self.assets, self.horizon);
        if n == 0 || l == 0 {
            return Err(Error::config("need at least one asset and one period"));
        }
        let shape = |name: &str, t: &[Vec<f64>], rows: usize| -> Result<()> {
            if t.len() != rows || t.iter().any(|r| r.len() != n) {
                return Err(Error::config(format!("{name} must be {rows} x {n}")));
            }
            if t.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::config(format!("{name} has non-finite entries")));
            }
            Ok(())
        };
        shape("price_mean", &self.price_mean, l + 1)?;
        shape("price_std", &self.price_std, l + 1)?;
        shape("sale_cost", &self.sale_cost, l)?;
        shape("purchase_cost", &self.purchase_cost, l)?;
        if self.price_mean.iter().flatten().any(|&m| m <= 0.0) {
            return Err(Error::config("price means must be positive"));
        }
        if self.price_std.iter().flatten().any(|&s| s < 0.0) {
            return Err(Error::config("price standard deviations must be nonnegative"));
        }
        if self.sale_cost.iter().chain(&self.purchase_cost).flatten().any(|&c| !(0.0..1.0).contains(&c)) {
            return Err(Error::config("transaction costs must lie in [0, 1)"));
        }
        if self.initial_holdings.len() != n || self.initial_holdings.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::config(format!("initial_holdings must be {n} nonnegative numbers")));
        }
        if !(self.initial_cash >= 0.0 && self.initial_cash.is_finite()) {
            return Err(Error::config("initial_cash must be nonnegative"));
        }
        if !(self.trade_bound > 0.0) {
            return Err(Error::config("trade_bound must be positive"));
        }
        if !(self.price_floor > 0.0) {
            return Err(Error::config("price_floor must be positive"));
        }
        Ok(())
    }

    /// Keys in [`MpaaConfig::KEYS`]. `price_file` loads full tables
    /// (`price_mean`, `price_std`, `sale_cost`, `purchase_cost`, row-major).
    pub fn from_config(cfg: &EnvConfig) -> Result<Self> {
        let r = cfg.reader("asset-allocation", &Self::KEYS)?;
        let d = Self::default();
        let assets = r.usize("assets")?.unwrap_or(d.assets);
        let horizon = r.usize("horizon")?.unwrap_or(d.horizon);
        let base = r.f64_array("base_price")?.unwrap_or_else(|| vec![1.0, 2.0, 4.0]);
        if base.is_empty() {
            return Err(Error::config("base_price must not be empty"));
        }
        let mut c = Self::synthetic(
            assets,
            horizon,
            &base,
            r.f64("drift")?.unwrap_or(0.03),
            r.f64("volatility")?.unwrap_or(0.05),
            r.f64("sale_cost")?.unwrap_or(0.01),
            r.f64("purchase_cost")?.unwrap_or(0.01),
        );
        c.initial_cash = r.f64("initial_cash")?.unwrap_or(c.initial_cash);
        c.trade_bound = r.f64("trade_bound")?.unwrap_or(c.trade_bound);
        c.price_floor = r.f64("price_floor")?.unwrap_or(c.price_floor);
        if let Some(path) = r.text("price_file")? {
            c.apply_price_file(Path::new(&path))?;
        }
        c.validate()?;
        Ok(c)
    }

    fn apply_price_file(&mut self, path: &Path) -> Result<()> {
        let file = EnvConfig::from_kv_file(path)?;
        let name = path.display().to_string();
        let r = file.reader(&name, &["price_mean", "price_std", "sale_cost", "purchase_cost"])?;
        let n = self.assets;
        let table = |key: &str, rows: usize| -> Result<Option<Vec<Vec<f64>>>> {
            let Some(v) = r.f64_array(key)? else { return Ok(None) };
            if v.len() == 1 {
                return Ok(Some(vec![vec![v[0]; n]; rows]));
            }
            if v.len() != rows * n {
                return Err(Error::config(format!("{key} in {name} has {} values, expected {}", v.len(), rows * n)));
            }
            Ok(Some(v.chunks(n).map(<[f64]>::to_vec).collect()))
        };
        if let Some(t) = table("price_mean", self.horizon + 1)? {
            self.price_mean = t;
        }
        if let Some(t) = table("price_std", self.horizon + 1)? {
            self.price_std = t;
        }
        if let Some(t) = table("sale_cost", self.horizon)? {
            self.sale_cost = t;
        }
        if let Some(t) = table("purchase_cost", self.horizon)? {
            self.purchase_cost = t;
        }
        Ok(())
    }

    /// Price-parameter file text read back by `price_file`.
    pub fn to_price_text(&self) -> String {
        let mut out = String::new();
        for (key, t) in [
            ("price_mean", &self.price_mean),
            ("price_std", &self.price_std),
            ("sale_cost", &self.sale_cost),
            ("purchase_cost", &self.purchase_cost),
        ] {
            let rows: Vec<String> =
                t.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")).collect();
            let _ = writeln!(out, "{key} = {}", rows.join("; "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_shapes() {
        let c = MpaaConfig::default();
        c.validate().unwrap();
        assert_eq!(c.price_mean.len(), 11);
        assert!((c.price_mean[10][0] - 1.03f64.powi(10)).abs() < 1e-12);
        assert!((c.price_std[0][2] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn price_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("prices.cfg");
        let mut src = MpaaConfig::synthetic(3, 10, &[3.0, 1.5, 7.25], 0.01, 0.1, 0.02, 0.03);
        src.sale_cost[4][1] = 0.2;
        std::fs::write(&path, src.to_price_text()).unwrap();
        let got = MpaaConfig::from_config(&EnvConfig::new().set("price_file", path.to_str().unwrap())).unwrap();
        assert_eq!(got.price_mean, src.price_mean);
        assert_eq!(got.price_std, src.price_std);
        assert_eq!(got.sale_cost, src.sale_cost);
        assert_eq!(got.purchase_cost, src.purchase_cost);
    }

    #[test]
    fn bad_costs_rejected() {
        assert!(MpaaConfig::from_config(&EnvConfig::new().set("sale_cost", 1.0)).is_err());
        assert!(MpaaConfig::from_config(&EnvConfig::new().set("horizon", 0.0)).is_err());
    }
}

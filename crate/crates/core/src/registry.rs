//! Construction of environments by id.

use crate::asset::MpaaEnv;
use crate::config::EnvConfig;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::inventory::InvManagementEnv;
use crate::knapsack::{KnapsackEnv, KnapsackVariant};
use crate::vm::{VmPackingConfig, VmPackingEnv};

/// Every registered environment id.
pub const ENV_IDS: [&str; 8] = [
    "knapsack-binary",
    "knapsack-bounded",
    "knapsack-online",
    "vm-packing",
    "vm-packing-masked",
    "inv-management-v0",
    "inv-management-v1",
    "asset-allocation",
];

/// Builds the environment registered as `id` with `config` overrides.
///
/// Unknown ids and keys are errors whose text lists the valid choices.
pub fn make_env(id: &str, config: &EnvConfig) -> Result<Box<dyn Environment>> {
    Ok(match id {
        "knapsack-binary" => Box::new(KnapsackEnv::from_config(KnapsackVariant::Binary, config)?),
        "knapsack-bounded" => Box::new(KnapsackEnv::from_config(KnapsackVariant::Bounded, config)?),
        "knapsack-online" => Box::new(KnapsackEnv::from_config(KnapsackVariant::Online, config)?),
        "vm-packing" | "vm-packing-masked" => {
            let c = VmPackingConfig::from_config(id, config)?;
            Box::new(VmPackingEnv::new(c, id == "vm-packing-masked", config.seed)?)
        }
        "inv-management-v0" => Box::new(InvManagementEnv::from_config(true, config)?),
        "inv-management-v1" => Box::new(InvManagementEnv::from_config(false, config)?),
        "asset-allocation" => Box::new(MpaaEnv::from_config(config)?),
        _ => return Err(Error::config(format!("unknown environment '{id}'; valid ids: {}", ENV_IDS.join(", ")))),
    })
}

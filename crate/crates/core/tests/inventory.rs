use std::collections::VecDeque;

use orbench_core::inventory::{
    read_demand_paths, transition, write_demand_paths, SupplyChainConfig, SupplyChainState,
};
use proptest::prelude::*;

fn stock(s: &SupplyChainState) -> u64 {
    s.on_hand.iter().sum::<u64>() + s.pipeline.iter().flatten().sum::<u64>()
}

fn state_for(config: &SupplyChainConfig) -> impl Strategy<Value = SupplyChainState> {
    let m = config.stages();
    let lead = config.lead_time.clone();
    let backlog = config.backlog;
    (
        prop::collection::vec(0u64..150, m),
        prop::collection::vec(0u64..60, lead.iter().sum::<usize>()),
        prop::collection::vec(0u64..40, m + 1),
        0usize..30,
    )
        .prop_map(move |(on_hand, flat, b, period)| {
            let mut it = flat.into_iter();
            let pipeline = lead.iter().map(|&l| it.by_ref().take(l).collect::<VecDeque<_>>()).collect();
            let backlog = if backlog { b } else { vec![0; m + 1] };
            SupplyChainState { period, on_hand, pipeline, backlog }
        })
}

fn check(config: &SupplyChainConfig, s: &SupplyChainState, req: &[u64], demand: u64) -> Result<(), TestCaseError> {
    let out = transition(config, s, req, demand);
    let m = config.stages();
    let n = &out.state;
    prop_assert_eq!(stock(n) + out.sales[0], stock(s) + out.accepted[m - 1]);
    for k in 0..m {
        prop_assert_eq!(n.pipeline[k].len(), config.lead_time[k]);
        prop_assert!(out.accepted[k] <= config.capacity[k]);
        if k + 1 < m {
            prop_assert!(out.accepted[k] <= s.on_hand[k + 1]);
        }
    }
    let owed = demand + s.backlog[0];
    prop_assert!(out.sales[0] <= owed);
    prop_assert_eq!(out.unfulfilled[0], owed - out.sales[0]);
    if config.backlog {
        prop_assert_eq!(&n.backlog, &out.unfulfilled);
    } else {
        prop_assert!(n.backlog.iter().all(|&b| b == 0));
    }
    prop_assert_eq!(n.period, s.period + 1);
    let back = SupplyChainState::from_observation(&n.to_observation(config), config).unwrap();
    prop_assert_eq!(&back, n);
    Ok(())
}

proptest! {
    #[test]
    fn backlog_transition_conserves_stock(
        s in state_for(&SupplyChainConfig::standard()),
        req in prop::collection::vec(0u64..120, 3),
        demand in 0u64..60,
    ) {
        check(&SupplyChainConfig::standard(), &s, &req, demand)?;
    }

    #[test]
    fn lost_sales_transition_conserves_stock(
        s in state_for(&SupplyChainConfig::lost_sales()),
        req in prop::collection::vec(0u64..120, 3),
        demand in 0u64..60,
    ) {
        check(&SupplyChainConfig::lost_sales(), &s, &req, demand)?;
    }

    #[test]
    fn demand_paths_round_trip(paths in prop::collection::vec(prop::collection::vec(0u64..100, 1..10), 0..5)) {
        let mut buf = Vec::new();
        write_demand_paths(&mut buf, &paths).unwrap();
        prop_assert_eq!(read_demand_paths(&buf[..]).unwrap(), paths);
    }
}

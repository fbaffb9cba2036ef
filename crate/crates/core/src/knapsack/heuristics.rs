use rand::Rng;

use super::{KnapsackInstance, KnapsackState, OfflineView};
use crate::env::{Action, Observation, Policy};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Item indices by descending value/weight ratio, ties to the lower index.
pub fn greedy_order(instance: &KnapsackInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&a, &b| instance.ratio(b).total_cmp(&instance.ratio(a)));
    order
}

/// Highest-ratio item that still fits and has copies left; `None` means stop.
pub fn greedy_policy(state: &KnapsackState, instance: &KnapsackInstance) -> Option<usize> {
    greedy_order(instance).into_iter().find(|&i| fits(state, instance, i))
}

fn fits(state: &KnapsackState, instance: &KnapsackInstance, i: usize) -> bool {
    state.remaining[i] > 0 && state.load + instance.weights[i] <= instance.capacity
}

/// Packs greedily without an environment; returns the selection counts.
pub fn greedy_solution(instance: &KnapsackInstance) -> Vec<u64> {
    let mut counts = vec![0u64; instance.len()];
    let mut load = 0u64;
    for i in greedy_order(instance) {
        let w = instance.weights[i];
        let room = (instance.capacity - load) / w;
        let k = room.min(instance.counts[i]);
        counts[i] = k;
        load += k * w;
    }
    counts
}

/// Greedy over the offline (BinKP/BKP) observation layout.
#[derive(Default)]
pub struct GreedyPolicy {
    order: Option<Vec<usize>>,
}

impl Policy for GreedyPolicy {
    fn begin_episode(&mut self, _seed: u64) {
        self.order = None;
    }

    fn act(&mut self, obs: &Observation) -> Result<Action> {
        let view = OfflineView::decode(obs)?;
        let order = self.order.get_or_insert_with(|| {
            let mut order: Vec<usize> = (0..view.values.len()).collect();
            order.sort_by(|&a, &b| {
                let ra = view.values[a] / view.weights[a];
                let rb = view.values[b] / view.weights[b];
                rb.total_cmp(&ra)
            });
            order
        });
        let pick = order
            .iter()
            .copied()
            .find(|&i| view.remaining[i] > 0.0 && view.load + view.weights[i] <= view.capacity);
        // Nothing fits only once the episode is over; any index is a no-op.
        Ok(Action::Discrete(pick.unwrap_or(0)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnlineDecision {
    Reject,
    Accept,
}

impl OnlineDecision {
    pub fn action(self) -> Action {
        Action::Discrete(match self {
            OnlineDecision::Reject => 0,
            OnlineDecision::Accept => 1,
        })
    }
}

/// One TwoBins decision.
///
/// `take_first` is the per-episode coin. `seen_weight` is the total weight of
/// all items shown so far, the current one included.
pub fn twobins_policy(take_first: bool, load: u64, capacity: u64, seen_weight: u64, item_weight: u64) -> OnlineDecision {
    let fits = load + item_weight <= capacity;
    let open = take_first || seen_weight > capacity;
    if open && fits {
        OnlineDecision::Accept
    } else {
        OnlineDecision::Reject
    }
}

/// TwoBins over the online observation layout `[v, w, load, capacity]`.
pub struct TwoBinsPolicy {
    rng: RngStream,
    take_first: bool,
    seen: u64,
}

impl Default for TwoBinsPolicy {
    fn default() -> Self {
        Self { rng: RngStream::new(0, "policy/twobins"), take_first: true, seen: 0 }
    }
}

impl TwoBinsPolicy {
    pub fn take_first(&self) -> bool {
        self.take_first
    }
}

impl Policy for TwoBinsPolicy {
    fn begin_episode(&mut self, seed: u64) {
        self.rng = RngStream::new(seed, "policy/twobins");
        self.take_first = self.rng.random_bool(0.5);
        self.seen = 0;
    }

    fn act(&mut self, obs: &Observation) -> Result<Action> {
        let [_, w, load, cap] = obs.values[..] else {
            return Err(Error::domain(format!("expected 4 online values, got {}", obs.values.len())));
        };
        let w = w as u64;
        self.seen += w;
        Ok(twobins_policy(self.take_first, load as u64, cap as u64, self.seen, w).action())
    }
}

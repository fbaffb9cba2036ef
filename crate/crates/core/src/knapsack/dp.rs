use super::KnapsackInstance;
use crate::error::{Error, Result};

/// Largest decision table (pieces x capacity cells) the solver will allocate.
const MAX_TABLE_CELLS: u64 = 1 << 31;

#[derive(Clone, Debug, PartialEq)]
pub struct DpSolution {
    pub value: f64,
    pub counts: Vec<u64>,
}

/// Exact 0-1 / bounded knapsack by dynamic programming over capacity.
///
/// Bounded counts are split into powers of two so each piece is a 0-1 item.
/// The returned value is recomputed from the selection.
pub fn solve_exact_dp(instance: &KnapsackInstance) -> Result<DpSolution> {
    let cap = instance.capacity;
    let mut pieces: Vec<(usize, u64)> = Vec::new();
    for i in 0..instance.len() {
        if instance.weights[i] > cap {
            continue;
        }
        let usable = instance.counts[i].min(cap / instance.weights[i]);
        let mut left = usable;
        let mut k = 1u64;
        while left > 0 {
            let take = k.min(left);
            pieces.push((i, take));
            left -= take;
            k = k.saturating_mul(2);
        }
    }

    let width = cap
        .checked_add(1)
        .ok_or_else(|| Error::Size(format!("capacity {cap} overflows the table index")))?;
    let cells = (pieces.len() as u64)
        .checked_mul(width)
        .filter(|&c| c <= MAX_TABLE_CELLS)
        .ok_or_else(|| Error::Size(format!("{} pieces x capacity {cap} exceeds the table limit", pieces.len())))?;
    let width = usize::try_from(width).map_err(|_| Error::Size(format!("capacity {cap} too large")))?;

    let mut best = vec![0.0f64; width];
    let mut take = vec![false; cells as usize];
    for (p, &(i, k)) in pieces.iter().enumerate() {
        let w = (instance.weights[i] * k) as usize;
        let v = instance.values[i] * k as f64;
        let row = &mut take[p * width..(p + 1) * width];
        for c in (w..width).rev() {
            let cand = best[c - w] + v;
            if cand > best[c] {
                best[c] = cand;
                row[c] = true;
            }
        }
    }

    let mut counts = vec![0u64; instance.len()];
    let mut c = width - 1;
    for (p, &(i, k)) in pieces.iter().enumerate().rev() {
        if take[p * width + c] {
            counts[i] += k;
            c -= (instance.weights[i] * k) as usize;
        }
    }
    Ok(DpSolution { value: instance.selection_value(&counts), counts })
}

/// Best value any accept/reject sequence could have collected from `draws`
/// (value, weight pairs, each usable once) with the given capacity.
pub fn okp_offline_oracle(draws: &[(f64, u64)], capacity: u64) -> Result<f64> {
    if draws.is_empty() {
        return Ok(0.0);
    }
    let inst = KnapsackInstance::binary(
        draws.iter().map(|d| d.0).collect(),
        draws.iter().map(|d| d.1).collect(),
        capacity,
    )?;
    Ok(solve_exact_dp(&inst)?.value)
}

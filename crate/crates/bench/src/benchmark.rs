//! Paired evaluation of several methods on one seeded episode set.

use std::collections::BTreeMap;
use std::time::Instant;

use orbench_core::rng::episode_seed;
use orbench_core::EnvConfig;
use rayon::prelude::*;

use crate::error::{usage, Result};
use crate::methods::{reference_method, MethodRunner};
use crate::report::{BenchmarkReport, ReportRow};

/// A finished benchmark: the report plus the per-episode totals behind it.
#[derive(Clone, Debug)]
pub struct BenchmarkRun {
    pub report: BenchmarkReport,
    /// Episode seeds, shared by every method.
    pub seeds: Vec<u64>,
    /// Per-method episode totals, in seed order.
    pub totals: BTreeMap<String, Vec<f64>>,
    /// Methods whose raw ratio fell below 1, i.e. that beat the reference.
    pub warnings: Vec<String>,
}

/// Seeds of the episode set for `master`; episode `i` never depends on how
/// many episodes or methods are run.
pub fn episode_seeds(master: u64, episodes: usize) -> Vec<u64> {
    (0..episodes as u64).map(|i| episode_seed(master, i)).collect()
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, (pairwise_sum(&dev) / n).sqrt())
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Unfloored ratio of a method mean against the reference mean.
///
/// Positive-reward problems use `reference / method`, negative-reward ones
/// `|method| / |reference|`, so larger is worse in both.
pub fn raw_ratio(reference: f64, method: f64) -> f64 {
    if reference > 0.0 {
        if method > 0.0 {
            reference / method
        } else {
            f64::INFINITY
        }
    } else if reference < 0.0 {
        method.abs() / reference.abs()
    } else if method >= 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// [`raw_ratio`] floored at 1.
pub fn performance_ratio(reference: f64, method: f64) -> f64 {
    raw_ratio(reference, method).max(1.0)
}

/// Evaluates each method on the same `episodes` seeded episodes. Reported
/// seconds include any offline preparation such as DFO fitting.
///
/// The reference method of `env` is always evaluated; it is added as the
/// first row when absent from `methods`. Repeated methods are run once.
pub fn run_benchmark(env: &str, config: &EnvConfig, methods: &[String], episodes: usize, seed: u64) -> Result<BenchmarkRun> {
    if episodes == 0 {
        return Err(usage("episodes must be at least 1"));
    }
    let reference = reference_method(env)?;
    let mut order: Vec<String> = Vec::new();
    if !methods.iter().any(|m| m == reference) {
        order.push(reference.to_string());
    }
    for m in methods {
        if !order.contains(m) {
            order.push(m.clone());
        }
    }
    // Validate every method before spending time on any of them.
    for m in &order {
        MethodRunner::check(env, m)?;
    }

    let seeds = episode_seeds(seed, episodes);
    let mut totals = BTreeMap::new();
    let mut timed = Vec::new();
    for method in &order {
        let start = Instant::now();
        let runner = MethodRunner::prepare(env, config, method, seed)?;
        let t = seeds.par_iter().map(|&s| runner.episode(s).map(|o| o.total)).collect::<Result<Vec<f64>>>()?;
        let seconds = start.elapsed().as_secs_f64();
        timed.push((runner.method().to_string(), seconds));
        totals.insert(runner.method().to_string(), t);
    }

    let ref_mean = mean_std(&totals[reference]).0;
    let mut warnings = Vec::new();
    let rows = timed
        .into_iter()
        .map(|(method, seconds)| {
            let (mean, std) = mean_std(&totals[&method]);
            let ratio = if method == reference {
                1.0
            } else {
                let raw = raw_ratio(ref_mean, mean);
                if raw < 1.0 - 1e-9 {
                    let w = format!("{env}: {method} mean {mean} beats reference {reference} mean {ref_mean} (raw ratio {raw})");
                    log::warn!("{w}");
                    warnings.push(w);
                }
                raw.max(1.0)
            };
            ReportRow { env: env.to_string(), method, episodes, seed, mean, std, ratio, seconds }
        })
        .collect();
    Ok(BenchmarkRun { report: BenchmarkReport { rows }, seeds, totals, warnings })
}

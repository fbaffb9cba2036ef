//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p orbench-bench --test acceptance`.

#[path = "../../lp/tests/support/vertex_enum.rs"]
mod vertex_enum;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use orbench_bench::{cem_train, evaluate_policy, run_benchmark, small_binkp_config, CemOptions};
use orbench_core::asset::{deterministic_plan, simulate_plan, MpaaConfig, MpaaEnv};
use orbench_core::inventory::{transition, SupplyChainConfig, SupplyChainState};
use orbench_core::knapsack::{greedy_solution, solve_exact_dp, InstanceGenerator, KnapsackInstance};
use orbench_core::rng::episode_seed;
use orbench_core::vm::{VmPackingConfig, VmPackingEnv, FIT_TOL};
use orbench_core::{EnvConfig, Environment, Policy, RandomPolicy, RngStream};
use orbench_lp::{solve, Direction, LpStatus, Sense, SolveOptions};
use rand::Rng;
use vertex_enum::{best_vertex_objective, random_bounded_lp};

type Check = fn() -> (bool, String);

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn brute_force_binary(inst: &KnapsackInstance) -> f64 {
    let n = inst.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        let (mut w, mut v) = (0u64, 0.0);
        for i in 0..n {
            if mask >> i & 1 == 1 {
                w += inst.weights[i];
                v += inst.values[i];
            }
        }
        if w <= inst.capacity {
            best = best.max(v);
        }
    }
    best
}

fn knapsack_exactness() -> (bool, String) {
    let mut rng = RngStream::new(1, "acceptance/knapsack-exact");
    let mut mismatches = 0;
    let mut dp_time = 0.0;
    let start = Instant::now();
    for _ in 0..500 {
        let n = rng.random_range(1..=15);
        let capacity = rng.random_range(0..=50);
        let values = (0..n).map(|_| rng.random_range(1..=100) as f64).collect();
        let weights = (0..n).map(|_| rng.random_range(1..=25)).collect();
        let inst = KnapsackInstance::binary(values, weights, capacity).unwrap();
        let t = Instant::now();
        let sol = solve_exact_dp(&inst).unwrap();
        dp_time += t.elapsed().as_secs_f64();
        if sol.value != brute_force_binary(&inst) || !inst.is_feasible(&sol.counts) {
            mismatches += 1;
        }
    }
    let total = start.elapsed().as_secs_f64();
    (
        mismatches == 0 && total < 10.0,
        format!("500 instances, {mismatches} mismatches, dp {dp_time:.3}s, total with enumeration {total:.3}s (limit 10s)"),
    )
}

fn greedy_quality() -> (bool, String) {
    let g = InstanceGenerator::bounded();
    let (mut infeasible, mut above, mut ratio_sum) = (0, 0, 0.0);
    for i in 0..100 {
        let inst = g.generate(&mut RngStream::new(episode_seed(2, i), "acceptance/bkp"));
        let greedy = greedy_solution(&inst);
        let dp = solve_exact_dp(&inst).unwrap().value;
        let gv = inst.selection_value(&greedy);
        infeasible += usize::from(!inst.is_feasible(&greedy));
        above += usize::from(gv > dp);
        ratio_sum += dp / gv;
    }
    let mean = ratio_sum / 100.0;
    (
        infeasible == 0 && above == 0 && mean <= 1.10,
        format!("100 BKP instances, infeasible {infeasible}, greedy > dp {above}, mean dp/greedy {mean:.4} (limit 1.10)"),
    )
}

fn online_dominance() -> (bool, String) {
    let run = run_benchmark("knapsack-online", &EnvConfig::new(), &strings(&["oracle", "twobins"]), 1000, 3).unwrap();
    let (o, t) = (&run.totals["oracle"], &run.totals["twobins"]);
    let violations = o.iter().zip(t).filter(|(a, b)| a < b).count();
    let ratio = run.report.row("twobins").unwrap().ratio;
    (
        violations == 0 && (1.3..=3.0).contains(&ratio),
        format!("1000 paired episodes, {violations} violations, mean oracle/twobins {ratio:.4} (band [1.3, 3.0])"),
    )
}

fn vm_masking() -> (bool, String) {
    // The unmasked variant reports overloads, so it is the one that can
    // expose an unsound mask.
    let mut env = VmPackingEnv::new(VmPackingConfig::default(), false, None).unwrap();
    let mut policy = RandomPolicy::new(env.action_space());
    let (mut steps, mut overloads, mut episode) = (0, 0, 0u64);
    while steps < 10_000 {
        let seed = episode_seed(4, episode);
        policy.begin_episode(seed);
        let mut obs = env.reset(Some(seed)).unwrap();
        loop {
            let r = env.step(&policy.act(&obs).unwrap()).unwrap();
            steps += 1;
            let c = env.cluster().unwrap();
            let over = c.cpu.iter().chain(&c.mem).any(|&u| u > 1.0 + FIT_TOL);
            overloads += usize::from(r.info.contains_key("overload") || over);
            if r.done || steps == 10_000 {
                break;
            }
            obs = r.observation;
        }
        episode += 1;
    }
    let run = run_benchmark("vm-packing-masked", &EnvConfig::new(), &strings(&["first-fit", "random"]), 100, 4).unwrap();
    let ff = run.report.row("first-fit").unwrap().mean;
    let rnd = run.report.row("random").unwrap().mean;
    (
        overloads == 0 && ff >= rnd,
        format!("{steps} masked random steps, {overloads} overloads; first-fit mean {ff:.2} vs random {rnd:.2} over 100 paired episodes"),
    )
}

fn inventory_reproduction() -> (bool, String) {
    let run = run_benchmark("inv-management-v0", &EnvConfig::new(), &strings(&["oracle", "shlp", "dfo"]), 100, 0).unwrap();
    let row = |m: &str| run.report.row(m).unwrap().clone();
    let (o, s, d) = (row("oracle"), row("shlp"), row("dfo"));
    let within = |x: f64, target: f64, tol: f64| (x - target).abs() <= tol * target;
    let bands = within(o.mean, 546.8, 0.10) && within(s.mean, 508.0, 0.10) && within(d.mean, 360.9, 0.15);
    let ordered = o.mean >= s.mean && s.mean >= d.mean;
    let timely = o.seconds + s.seconds < 300.0 && d.seconds < 600.0;
    (
        bands && ordered && timely,
        format!(
            "100 paths: oracle {:.1} (546.8 +/-10%), shlp {:.1} (508.0 +/-10%), dfo {:.1} (360.9 +/-15%); ordered {ordered}; oracle+shlp {:.1}s, dfo {:.1}s",
            o.mean,
            s.mean,
            d.mean,
            o.seconds + s.seconds,
            d.seconds
        ),
    )
}

fn inventory_micro_oracle() -> (bool, String) {
    let c = SupplyChainConfig::standard();
    let state = |on_hand: Vec<u64>| SupplyChainState { on_hand, ..SupplyChainState::initial(&c) };

    let a = transition(&c, &state(vec![10, 100, 200]), &[0, 0, 0], 4);
    let profit_case = a.sales[0] == 4 && a.state.on_hand[0] == 6 && a.unfulfilled[0] == 0 && (a.profit[0] - 7.1).abs() < 1e-12;
    let b = transition(&c, &state(vec![0, 100, 200]), &[0, 0, 0], 4);
    let backlog_case = b.unfulfilled[0] == 4 && b.state.backlog[0] == 4 && (b.profit[0] + 0.4).abs() < 1e-12;
    let k = transition(&c, &state(vec![100, 100, 200]), &[0, 120, 0], 0);
    let capacity_case = k.accepted[1] == 90;
    (
        profit_case && backlog_case && capacity_case,
        format!(
            "profit case P0 = {} (7.1), backlog case U = {} B' = {} P0 = {} (-0.4), capacity case R1 = {} (90)",
            a.profit[0], b.unfulfilled[0], b.state.backlog[0], b.profit[0], k.accepted[1]
        ),
    )
}

fn lp_oracle() -> (bool, String) {
    let mut rng = RngStream::new(5, "acceptance/lp");
    let opts = SolveOptions::default();
    let mut worst: f64 = 0.0;
    let mut wrong = 0;
    for _ in 0..200 {
        let p = random_bounded_lp(&mut rng);
        let s = solve(&p, &opts).unwrap();
        let best = best_vertex_objective(&p).expect("generator builds feasible problems");
        let err = (s.objective - best).abs() / (1.0 + best.abs());
        worst = worst.max(err);
        wrong += usize::from(s.status != LpStatus::Optimal || err > 1e-6);
    }
    let mut misclassified = 0;
    for _ in 0..50 {
        let mut p = random_bounded_lp(&mut rng);
        let mut row = vec![0.0; p.num_vars()];
        row[0] = 1.0;
        let hi = p.upper[0];
        p.add_row(row, Sense::Ge, hi + 1.0);
        misclassified += usize::from(solve(&p, &opts).unwrap().status != LpStatus::Infeasible);

        let mut q = random_bounded_lp(&mut rng);
        q.objective.push(if q.direction == Direction::Maximize { 1.0 } else { -1.0 });
        q.lower.push(0.0);
        q.upper.push(f64::INFINITY);
        for r in &mut q.rows {
            r.push(0.0);
        }
        misclassified += usize::from(solve(&q, &opts).unwrap().status != LpStatus::Unbounded);
    }
    (
        wrong == 0 && misclassified == 0,
        format!("200 random LPs, {wrong} mismatches (worst relative gap {worst:.2e}); 100 infeasible/unbounded cases, {misclassified} misclassified"),
    )
}

fn mpaa_self_consistency() -> (bool, String) {
    let mut configs = vec![MpaaConfig::default()];
    let mut rng = RngStream::new(6, "acceptance/mpaa");
    for _ in 0..49 {
        let n = rng.random_range(1..=4);
        let horizon = rng.random_range(1..=12);
        let base: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..5.0)).collect();
        configs.push(MpaaConfig::synthetic(
            n,
            horizon,
            &base,
            rng.random_range(-0.05..0.15),
            0.05,
            rng.random_range(0.0..0.03),
            rng.random_range(0.0..0.03),
        ));
    }
    let mut worst: f64 = 0.0;
    for c in &configs {
        let (plan, value) = deterministic_plan(c).unwrap();
        let wealth = simulate_plan(&plan, c, &c.price_mean);
        worst = worst.max((value - wealth).abs() / value.abs().max(1.0));
    }

    let mut env = MpaaEnv::new(MpaaConfig::default(), None).unwrap();
    let mut policy = RandomPolicy::new(env.action_space());
    let (mut steps, mut negative, mut episode) = (0, 0, 0u64);
    while steps < 10_000 {
        let seed = episode_seed(6, episode);
        policy.begin_episode(seed);
        let mut obs = env.reset(Some(seed)).unwrap();
        loop {
            let r = env.step(&policy.act(&obs).unwrap()).unwrap();
            steps += 1;
            let s = env.state().unwrap();
            negative += usize::from(s.cash < 0.0 || s.holdings.iter().any(|&x| x < 0.0));
            if r.done {
                break;
            }
            obs = r.observation;
        }
        episode += 1;
    }
    (
        worst <= 1e-6 && negative == 0,
        format!("50 configs, worst relative lp/simulation gap {worst:.2e} (limit 1e-6); {steps} random steps, {negative} negative states"),
    )
}

fn learning_loop() -> (bool, String) {
    let cfg = small_binkp_config();
    let r = cem_train("knapsack-binary", &cfg, &CemOptions { seed: 0, ..CemOptions::default() }).unwrap();
    let before = evaluate_policy("knapsack-binary", &cfg, &r.initial, &r.eval_seeds).unwrap();
    let after = evaluate_policy("knapsack-binary", &cfg, &r.policy, &r.eval_seeds).unwrap();
    let curve = r.curve[r.curve.len() - 1] / r.curve[0];
    (
        after >= 1.2 * before && curve >= 1.2,
        format!(
            "50 iterations x 64: mean reward {before:.1} -> {after:.1} ({:.3}x); elite curve {:.1} -> {:.1} ({curve:.3}x); need 1.2x",
            after / before,
            r.curve[0],
            r.curve[r.curve.len() - 1]
        ),
    )
}

fn main() {
    let checks: [(&str, Check); 9] = [
        ("knapsack exactness", knapsack_exactness),
        ("greedy quality", greedy_quality),
        ("online dominance", online_dominance),
        ("vm masking", vm_masking),
        ("inventory reproduction", inventory_reproduction),
        ("inventory micro-oracle", inventory_micro_oracle),
        ("lp oracle equivalence", lp_oracle),
        ("mpaa self-consistency", mpaa_self_consistency),
        ("learning loop", learning_loop),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let (pass, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failed += usize::from(!pass);
        println!("{} {name}: {detail} [{:.1}s]", if pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

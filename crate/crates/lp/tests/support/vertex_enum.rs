//! Brute-force LP oracle: enumerates every basic solution of a bounded LP.
//!
//! Every vertex of `{x : rows hold, l <= x <= u}` is the unique solution of
//! `n` active hyperplanes drawn from the rows and the bound faces. With all
//! bounds finite the feasible set is a polytope, so the optimum (if the set
//! is nonempty) sits on one of these points.

use orbench_lp::{Direction, LpProblem, Sense};

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for k in col..n {
                        a[r][k] -= f * a[col][k];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn feasible(p: &LpProblem, x: &[f64], tol: f64) -> bool {
    for j in 0..p.num_vars() {
        if x[j] < p.lower[j] - tol || x[j] > p.upper[j] + tol {
            return false;
        }
    }
    p.rows.iter().zip(&p.senses).zip(&p.rhs).all(|((row, s), &b)| {
        let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
        match s {
            Sense::Le => lhs <= b + tol,
            Sense::Ge => lhs >= b - tol,
            Sense::Eq => (lhs - b).abs() <= tol,
        }
    })
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Best objective over all feasible basic solutions, or `None` if none exist.
/// Requires finite bounds on every variable.
pub fn best_vertex_objective(p: &LpProblem) -> Option<f64> {
    let n = p.num_vars();
    assert!(p.lower.iter().chain(&p.upper).all(|v| v.is_finite()));
    let mut planes: Vec<(Vec<f64>, f64)> = p.rows.iter().cloned().zip(p.rhs.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), p.lower[j]));
        planes.push((e, p.upper[j]));
    }
    let mut best: Option<f64> = None;
    combinations(planes.len(), n, &mut |idx| {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(p, &x, 1e-9) {
                let v = p.objective_value(&x);
                best = Some(match (best, p.direction) {
                    (None, _) => v,
                    (Some(b), Direction::Maximize) => b.max(v),
                    (Some(b), Direction::Minimize) => b.min(v),
                });
            }
        }
    });
    best
}

/// Random feasible LP with finite bounds (at most 6 variables, 6 rows).
pub fn random_bounded_lp(rng: &mut impl rand::Rng) -> LpProblem {
    let n = rng.random_range(1..=6);
    let m = rng.random_range(0..=6);
    let dir = if rng.random_bool(0.5) { Direction::Maximize } else { Direction::Minimize };
    let c = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    let mut p = LpProblem::new(dir, c);
    let mut x0 = Vec::with_capacity(n);
    for j in 0..n {
        let l = rng.random_range(-5..=3) as f64;
        let u = l + rng.random_range(1..=6) as f64;
        p.set_bounds(j, l, u);
        x0.push(rng.random_range(l..=u));
    }
    for _ in 0..m {
        let row: Vec<f64> = (0..n).map(|_| rng.random_range(-4..=4) as f64).collect();
        let ax: f64 = row.iter().zip(&x0).map(|(a, v)| a * v).sum();
        let slack = rng.random_range(0.0..3.0);
        match rng.random_range(0..5) {
            0 => p.add_row(row, Sense::Eq, ax),
            1 | 2 => p.add_row(row, Sense::Ge, ax - slack),
            _ => p.add_row(row, Sense::Le, ax + slack),
        };
    }
    p
}

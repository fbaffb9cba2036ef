use crate::problem::{Direction, LpError, LpProblem, Sense};

/// Solver tolerances and limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Smallest tableau entry accepted as a pivot.
    pub pivot_tol: f64,
    /// Primal feasibility tolerance (phase-one residual, bound clean-up).
    pub feasibility_tol: f64,
    /// Reduced-cost tolerance for optimality.
    pub optimality_tol: f64,
    pub max_iterations: usize,
    /// Consecutive degenerate pivots after which pricing switches to Bland's rule.
    pub stall_threshold: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-9,
            feasibility_tol: 1e-7,
            optimality_tol: 1e-9,
            max_iterations: 100_000,
            stall_threshold: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point in the original variables. For non-optimal statuses this
    /// is the last basis visited and may violate constraints.
    pub x: Vec<f64>,
    /// Objective value at `x`, in the problem's own direction.
    pub objective: f64,
    /// Row multipliers `y` such that `c - A'y` is the reduced-cost vector.
    /// Only meaningful when `status == Optimal`.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// How an original variable maps onto internal nonnegative columns.
#[derive(Clone, Copy, Debug)]
enum ColumnMap {
    /// `x = offset + y`
    Shifted { col: usize, offset: f64 },
    /// `x = offset - y`
    Reflected { col: usize, offset: f64 },
    /// `x = y_pos - y_neg`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    m: usize,
    n: usize,
    a: Vec<f64>,
    xb: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    upper: Vec<f64>,
    d: Vec<f64>,
    bland: bool,
    degenerate_streak: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, k: usize) -> f64 {
        self.a[i * self.n + k]
    }

    fn nonbasic_value(&self, k: usize) -> f64 {
        if self.at_upper[k] {
            self.upper[k]
        } else {
            0.0
        }
    }

    fn price(&mut self, cost: &[f64]) {
        self.d.copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.n..(i + 1) * self.n];
                for (dk, aik) in self.d.iter_mut().zip(row) {
                    *dk -= cb * aik;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let n = self.n;
        let p = self.a[r * n + q];
        for k in 0..n {
            self.a[r * n + k] /= p;
        }
        self.a[r * n + q] = 1.0;
        let (head, rest) = self.a.split_at_mut(r * n);
        let (prow, tail) = rest.split_at_mut(n);
        for row in head.chunks_exact_mut(n).chain(tail.chunks_exact_mut(n)) {
            let f = row[q];
            if f != 0.0 {
                for (x, pr) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * pr;
                }
                row[q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (x, pr) in self.d.iter_mut().zip(prow.iter()) {
                *x -= f * pr;
            }
            self.d[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    fn choose_entering(&self, allowed: &dyn Fn(usize) -> bool, tol: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for k in 0..self.n {
            if self.is_basic[k] || !allowed(k) || self.upper[k] <= 0.0 {
                continue;
            }
            let dk = self.d[k];
            let gain = if self.at_upper[k] { dk } else { -dk };
            if gain > tol {
                if self.bland {
                    return Some(k);
                }
                if best.map_or(true, |(_, g)| gain > g) {
                    best = Some((k, gain));
                }
            }
        }
        best.map(|(k, _)| k)
    }

    fn run_phase(
        &mut self,
        allowed: &dyn Fn(usize) -> bool,
        opts: &SolveOptions,
        iterations: &mut usize,
    ) -> PhaseEnd {
        loop {
            let Some(q) = self.choose_entering(allowed, opts.optimality_tol) else {
                return PhaseEnd::Optimal;
            };
            if *iterations >= opts.max_iterations {
                return PhaseEnd::IterationLimit;
            }
            *iterations += 1;

            let dir = if self.at_upper[q] { -1.0 } else { 1.0 };
            let mut theta = self.upper[q];
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let alpha = dir * self.at(i, q);
                let ratio = if alpha > opts.pivot_tol {
                    self.xb[i].max(0.0) / alpha
                } else if alpha < -opts.pivot_tol {
                    let ub = self.upper[self.basis[i]];
                    if ub.is_finite() {
                        (ub - self.xb[i]).max(0.0) / -alpha
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                let better = match leave {
                    None => ratio < theta,
                    Some((r, a)) => {
                        if ratio < theta {
                            true
                        } else if ratio == theta {
                            if self.bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                alpha.abs() > a.abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = ratio;
                    leave = Some((i, alpha));
                }
            }
            if !theta.is_finite() {
                return PhaseEnd::Unbounded;
            }

            if theta <= 1e-12 {
                self.degenerate_streak += 1;
                if self.degenerate_streak > opts.stall_threshold {
                    self.bland = true;
                }
            } else {
                self.degenerate_streak = 0;
            }

            for i in 0..self.m {
                let aiq = self.at(i, q);
                if aiq != 0.0 {
                    self.xb[i] -= dir * theta * aiq;
                }
            }
            match leave {
                None => {
                    self.at_upper[q] = !self.at_upper[q];
                }
                Some((r, alpha)) => {
                    let leaving = self.basis[r];
                    self.at_upper[leaving] = alpha < 0.0;
                    let entering_value = if dir > 0.0 { theta } else { self.upper[q] - theta };
                    self.at_upper[q] = false;
                    self.xb[r] = entering_value;
                    self.pivot(r, q);
                }
            }
        }
    }
}

/// Solves `problem` with the two-phase bounded simplex.
///
/// Returns `Err` only for malformed problems; infeasibility and unboundedness
/// are reported through [`LpSolution::status`].
pub fn solve(problem: &LpProblem, opts: &SolveOptions) -> Result<LpSolution, LpError> {
    problem.validate()?;
    let nvars = problem.num_vars();
    let sign = match problem.direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };

    // Map original variables onto nonnegative internal columns.
    let mut maps = Vec::with_capacity(nvars);
    let mut col_upper = Vec::new();
    let mut col_cost = Vec::new();
    for j in 0..nvars {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        let c = sign * problem.objective[j];
        if l.is_finite() {
            maps.push(ColumnMap::Shifted { col: col_upper.len(), offset: l });
            col_upper.push(u - l);
            col_cost.push(c);
        } else if u.is_finite() {
            maps.push(ColumnMap::Reflected { col: col_upper.len(), offset: u });
            col_upper.push(f64::INFINITY);
            col_cost.push(-c);
        } else {
            let pos = col_upper.len();
            maps.push(ColumnMap::Split { pos, neg: pos + 1 });
            col_upper.extend([f64::INFINITY, f64::INFINITY]);
            col_cost.extend([c, -c]);
        }
    }
    let ns = col_upper.len();

    // Transformed rows; empty rows are checked and dropped.
    struct Row {
        orig: usize,
        coeffs: Vec<f64>,
        sense: Sense,
        rhs: f64,
        flipped: bool,
    }
    let mut rows = Vec::new();
    let mut trivially_infeasible = false;
    for (i, orig) in problem.rows.iter().enumerate() {
        let mut coeffs = vec![0.0; ns];
        let mut rhs = problem.rhs[i];
        for (j, &a) in orig.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                ColumnMap::Shifted { col, offset } => {
                    coeffs[col] += a;
                    rhs -= a * offset;
                }
                ColumnMap::Reflected { col, offset } => {
                    coeffs[col] -= a;
                    rhs -= a * offset;
                }
                ColumnMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        let mut sense = problem.senses[i];
        if coeffs.iter().all(|&a| a == 0.0) {
            let ok = match sense {
                Sense::Le => rhs >= -opts.feasibility_tol,
                Sense::Ge => rhs <= opts.feasibility_tol,
                Sense::Eq => rhs.abs() <= opts.feasibility_tol,
            };
            trivially_infeasible |= !ok;
            continue;
        }
        let flipped = rhs < 0.0;
        if flipped {
            coeffs.iter_mut().for_each(|a| *a = -*a);
            rhs = -rhs;
            sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
        rows.push(Row { orig: i, coeffs, sense, rhs, flipped });
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.sense != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.sense != Sense::Le).count();
    let n = ns + n_slack + n_art;
    let art_start = ns + n_slack;

    let mut a = vec![0.0; m * n];
    let mut basis = vec![0; m];
    let mut init_col = vec![0; m];
    let mut upper = col_upper;
    upper.resize(n, f64::INFINITY);
    let (mut next_slack, mut next_art) = (ns, art_start);
    for (i, row) in rows.iter().enumerate() {
        a[i * n..i * n + ns].copy_from_slice(&row.coeffs);
        match row.sense {
            Sense::Le => {
                a[i * n + next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                a[i * n + next_slack] = -1.0;
                next_slack += 1;
                a[i * n + next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                a[i * n + next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
        }
        init_col[i] = basis[i];
    }
    let mut is_basic = vec![false; n];
    for &b in &basis {
        is_basic[b] = true;
    }

    let mut t = Tableau {
        m,
        n,
        a,
        xb: rows.iter().map(|r| r.rhs).collect(),
        basis,
        is_basic,
        at_upper: vec![false; n],
        upper,
        d: vec![0.0; n],
        bland: false,
        degenerate_streak: 0,
    };
    let mut iterations = 0;

    let recover = |t: &Tableau| -> Vec<f64> {
        let mut val = vec![0.0; n];
        for k in 0..n {
            if !t.is_basic[k] {
                val[k] = t.nonbasic_value(k);
            }
        }
        for (i, &b) in t.basis.iter().enumerate() {
            let ub = t.upper[b];
            val[b] = t.xb[i].max(0.0).min(if ub.is_finite() { ub } else { f64::INFINITY });
        }
        maps.iter()
            .map(|mp| match *mp {
                ColumnMap::Shifted { col, offset } => offset + val[col],
                ColumnMap::Reflected { col, offset } => offset - val[col],
                ColumnMap::Split { pos, neg } => val[pos] - val[neg],
            })
            .collect()
    };
    let finish = |status: LpStatus, x: Vec<f64>, duals: Vec<f64>, iterations: usize| LpSolution {
        objective: problem.objective_value(&x),
        status,
        x,
        duals,
        iterations,
    };

    if trivially_infeasible {
        let x = recover(&t);
        return Ok(finish(LpStatus::Infeasible, x, vec![0.0; problem.num_rows()], 0));
    }

    // Phase one: drive the artificials to zero.
    if n_art > 0 {
        let mut cost1 = vec![0.0; n];
        cost1[art_start..].iter_mut().for_each(|c| *c = 1.0);
        t.price(&cost1);
        match t.run_phase(&|_| true, opts, &mut iterations) {
            PhaseEnd::Optimal => {}
            PhaseEnd::IterationLimit => {
                let x = recover(&t);
                return Ok(finish(LpStatus::IterationLimit, x, vec![0.0; problem.num_rows()], iterations));
            }
            PhaseEnd::Unbounded => unreachable!("phase one objective is bounded below"),
        }
        let scale = 1.0 + rows.iter().map(|r| r.rhs).fold(0.0, f64::max);
        let residual: f64 = t
            .basis
            .iter()
            .zip(&t.xb)
            .filter(|(&b, _)| b >= art_start)
            .map(|(_, &v)| v.max(0.0))
            .sum();
        if residual > opts.feasibility_tol * scale {
            let x = recover(&t);
            return Ok(finish(LpStatus::Infeasible, x, vec![0.0; problem.num_rows()], iterations));
        }
        for k in art_start..n {
            t.upper[k] = 0.0;
            t.at_upper[k] = false;
        }
    }

    // Phase two: original objective; artificials are pinned at zero.
    let mut cost2 = vec![0.0; n];
    cost2[..ns].copy_from_slice(&col_cost);
    t.price(&cost2);
    let end = t.run_phase(&|k| k < art_start, opts, &mut iterations);
    let x = recover(&t);
    let status = match end {
        PhaseEnd::Optimal => LpStatus::Optimal,
        PhaseEnd::Unbounded => LpStatus::Unbounded,
        PhaseEnd::IterationLimit => LpStatus::IterationLimit,
    };

    let mut duals = vec![0.0; problem.num_rows()];
    if status == LpStatus::Optimal {
        for (i, row) in rows.iter().enumerate() {
            // Initial basis columns carry zero phase-two cost, so d = -y.
            let y = -t.d[init_col[i]];
            let y = if row.flipped { -y } else { y };
            duals[row.orig] = sign * y;
        }
    }
    Ok(finish(status, x, duals, iterations))
}

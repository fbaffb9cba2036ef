use crate::problem::{LpProblem, Sense};

/// Residuals of a candidate point, recomputed from the problem data alone.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    /// Per-row violation (zero when the row holds).
    pub row_violations: Vec<f64>,
    pub max_row_violation: f64,
    pub max_bound_violation: f64,
    pub objective: f64,
}

impl ResidualReport {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_row_violation <= tol && self.max_bound_violation <= tol
    }
}

/// Recomputes row and bound violations of `x` for `problem`.
pub fn verify(problem: &LpProblem, x: &[f64]) -> ResidualReport {
    let row_violations: Vec<f64> = problem
        .rows
        .iter()
        .zip(&problem.senses)
        .zip(&problem.rhs)
        .map(|((row, sense), &b)| {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            match sense {
                Sense::Le => (lhs - b).max(0.0),
                Sense::Ge => (b - lhs).max(0.0),
                Sense::Eq => (lhs - b).abs(),
            }
        })
        .collect();
    let max_bound_violation = x
        .iter()
        .zip(problem.lower.iter().zip(&problem.upper))
        .map(|(&v, (&l, &u))| (l - v).max(v - u).max(0.0))
        .fold(0.0, f64::max);
    ResidualReport {
        max_row_violation: row_violations.iter().copied().fold(0.0, f64::max),
        row_violations,
        max_bound_violation,
        objective: problem.objective_value(x),
    }
}

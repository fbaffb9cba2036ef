use std::fmt;

use thiserror::Error;

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Row relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row {row} has {got} coefficients, expected {expected}")]
    RowLength { row: usize, got: usize, expected: usize },
    #[error("variable {var} has lower bound {lower} above upper bound {upper}")]
    CrossedBounds { var: usize, lower: f64, upper: f64 },
    #[error("variable {var} has lower bound +inf or upper bound -inf")]
    InfiniteBound { var: usize },
    #[error("right-hand side of row {row} is not finite")]
    NonFiniteRhs { row: usize },
    #[error("non-finite coefficient in {what}")]
    NonFiniteCoefficient { what: String },
}

/// A linear program with a dense constraint matrix.
///
/// Variables default to `0 <= x <= +inf`. Build with [`LpProblem::new`] and
/// [`LpProblem::add_row`].
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub direction: Direction,
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Optional variable names, used only by the text dump.
    pub names: Vec<String>,
}

impl LpProblem {
    pub fn new(direction: Direction, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            direction,
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            names: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> usize {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    /// Adds a row given as `(column, coefficient)` pairs; repeated columns add up.
    pub fn add_sparse_row(&mut self, terms: &[(usize, f64)], sense: Sense, rhs: f64) -> usize {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(j, a) in terms {
            coeffs[j] += a;
        }
        self.add_row(coeffs, sense, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_names(&mut self, names: Vec<String>) {
        self.names = names;
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFiniteCoefficient { what: "objective".into() });
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::RowLength { row: i, got: row.len(), expected: n });
            }
            if row.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFiniteCoefficient { what: format!("row {i}") });
            }
            if !self.rhs[i].is_finite() {
                return Err(LpError::NonFiniteRhs { row: i });
            }
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l == f64::INFINITY || u == f64::NEG_INFINITY || l.is_nan() || u.is_nan() {
                return Err(LpError::InfiniteBound { var: j });
            }
            if l > u {
                return Err(LpError::CrossedBounds { var: j, lower: l, upper: u });
            }
        }
        Ok(())
    }

    /// Objective value of `x` in the problem's own direction.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    fn var_name(&self, j: usize) -> String {
        self.names.get(j).cloned().unwrap_or_else(|| format!("x{j}"))
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, p: &LpProblem, coeffs: &[f64]) -> fmt::Result {
    let mut first = true;
    for (j, &a) in coeffs.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let sign = if a < 0.0 { "-" } else if first { "" } else { "+" };
        if !first || a < 0.0 {
            write!(f, " {sign} ")?;
        }
        let mag = a.abs();
        if mag == 1.0 {
            write!(f, "{}", p.var_name(j))?;
        } else {
            write!(f, "{mag} {}", p.var_name(j))?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Human-readable equation dump, used when diagnosing failed solves.
impl fmt::Display for LpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            Direction::Minimize => writeln!(f, "minimize")?,
            Direction::Maximize => writeln!(f, "maximize")?,
        }
        write!(f, "  obj: ")?;
        write_terms(f, self, &self.objective)?;
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for (i, row) in self.rows.iter().enumerate() {
            write!(f, "  r{i}: ")?;
            write_terms(f, self, row)?;
            writeln!(f, " {} {}", self.senses[i].symbol(), self.rhs[i])?;
        }
        writeln!(f, "bounds")?;
        for j in 0..self.num_vars() {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l == 0.0 && u == f64::INFINITY {
                continue;
            }
            let lo = if l == f64::NEG_INFINITY { "-inf".to_string() } else { l.to_string() };
            let hi = if u == f64::INFINITY { "+inf".to_string() } else { u.to_string() };
            writeln!(f, "  {lo} <= {} <= {hi}", self.var_name(j))?;
        }
        writeln!(f, "end")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_lists_rows_and_bounds() {
        let mut p = LpProblem::new(Direction::Maximize, vec![1.0, 1.0]);
        p.add_row(vec![1.0, 2.0], Sense::Le, 4.0);
        p.set_bounds(0, 0.0, 3.0);
        let text = p.to_string();
        assert!(text.starts_with("maximize\n  obj: x0 + x1\n"), "{text}");
        assert!(text.contains("r0: x0 + 2 x1 <= 4"), "{text}");
        assert!(text.contains("0 <= x0 <= 3"), "{text}");
        assert!(!text.contains("x1 <= +inf"), "{text}");
    }

    #[test]
    fn validation_catches_bad_shapes() {
        let mut p = LpProblem::new(Direction::Minimize, vec![1.0, 1.0]);
        p.add_row(vec![1.0], Sense::Le, 1.0);
        assert!(matches!(p.validate(), Err(LpError::RowLength { row: 0, .. })));

        let mut p = LpProblem::new(Direction::Minimize, vec![1.0]);
        p.set_bounds(0, 2.0, 1.0);
        assert!(matches!(p.validate(), Err(LpError::CrossedBounds { var: 0, .. })));
    }
}

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// Item values, integer weights, copy counts and an integer capacity.
#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackInstance {
    pub values: Vec<f64>,
    pub weights: Vec<u64>,
    pub counts: Vec<u64>,
    pub capacity: u64,
}

impl KnapsackInstance {
    pub fn new(values: Vec<f64>, weights: Vec<u64>, counts: Vec<u64>, capacity: u64) -> Result<Self> {
        let n = values.len();
        if weights.len() != n || counts.len() != n {
            return Err(Error::config(format!(
                "item vectors differ in length: {} values, {} weights, {} counts",
                n,
                weights.len(),
                counts.len()
            )));
        }
        for i in 0..n {
            if !(values[i].is_finite() && values[i] > 0.0) {
                return Err(Error::config(format!("item {i}: value must be positive, got {}", values[i])));
            }
            if weights[i] == 0 {
                return Err(Error::config(format!("item {i}: weight must be positive")));
            }
            if counts[i] == 0 {
                return Err(Error::config(format!("item {i}: count must be positive")));
            }
        }
        Ok(Self { values, weights, counts, capacity })
    }

    pub fn binary(values: Vec<f64>, weights: Vec<u64>, capacity: u64) -> Result<Self> {
        let n = values.len();
        Self::new(values, weights, vec![1; n], capacity)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.counts.iter().all(|&c| c == 1)
    }

    pub fn ratio(&self, i: usize) -> f64 {
        self.values[i] / self.weights[i] as f64
    }

    pub fn selection_weight(&self, counts: &[u64]) -> u64 {
        counts.iter().zip(&self.weights).map(|(c, w)| c * w).sum()
    }

    pub fn selection_value(&self, counts: &[u64]) -> f64 {
        counts.iter().zip(&self.values).map(|(&c, v)| c as f64 * v).sum()
    }

    /// True when `counts` respects both the capacity and the copy limits.
    pub fn is_feasible(&self, counts: &[u64]) -> bool {
        counts.len() == self.len()
            && counts.iter().zip(&self.counts).all(|(c, n)| c <= n)
            && self.selection_weight(counts) <= self.capacity
    }

    /// Parses the text format: a `W n` header, then `n` lines of `v w N`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing 'W n' header"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::parse(hline, format!("header must be 'W n', got '{header}'")));
        }
        let capacity = parse_int(head[0], hline, "capacity")?;
        let n = parse_int(head[1], hline, "item count")? as usize;
        let (mut values, mut weights, mut counts) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for (line, body) in lines {
            let f: Vec<&str> = body.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::parse(line, format!("expected 'v w N', got '{body}'")));
            }
            let v: f64 = f[0].parse().map_err(|_| Error::parse(line, format!("bad value '{}'", f[0])))?;
            values.push(v);
            weights.push(parse_int(f[1], line, "weight")?);
            counts.push(parse_int(f[2], line, "count")?);
        }
        if values.len() != n {
            return Err(Error::parse(hline, format!("header declares {n} items, found {}", values.len())));
        }
        Self::new(values, weights, counts, capacity)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.capacity, self.len());
        for i in 0..self.len() {
            let _ = writeln!(out, "{} {} {}", self.values[i], self.weights[i], self.counts[i]);
        }
        out
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_text())?)
    }
}

fn parse_int(s: &str, line: usize, what: &str) -> Result<u64> {
    s.parse::<u64>().map_err(|_| {
        if s.parse::<f64>().is_ok() {
            Error::parse(line, format!("{what} must be a nonnegative integer, got '{s}'"))
        } else {
            Error::parse(line, format!("bad {what} '{s}'"))
        }
    })
}

/// Random instances: integer weights on `[1, max_weight]`, integer-valued
/// values on `[1, max_value]`, counts on `[1, max_count]`.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceGenerator {
    pub items: usize,
    pub max_weight: u64,
    pub max_value: u64,
    pub max_count: u64,
    pub capacity: u64,
}

impl InstanceGenerator {
    pub fn binary() -> Self {
        Self { items: 200, max_weight: 100, max_value: 100, max_count: 1, capacity: 200 }
    }

    pub fn bounded() -> Self {
        Self { max_count: 10, ..Self::binary() }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> KnapsackInstance {
        let n = self.items;
        let mut values = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut counts = Vec::with_capacity(n);
        for _ in 0..n {
            weights.push(rng.random_range(1..=self.max_weight));
            values.push(rng.random_range(1..=self.max_value) as f64);
            counts.push(rng.random_range(1..=self.max_count));
        }
        KnapsackInstance { values, weights, counts, capacity: self.capacity }
    }

    pub fn validate(&self) -> Result<()> {
        if self.items == 0 || self.max_weight == 0 || self.max_value == 0 || self.max_count == 0 {
            return Err(Error::config("generator needs items, max_weight, max_value, max_count >= 1"));
        }
        Ok(())
    }
}

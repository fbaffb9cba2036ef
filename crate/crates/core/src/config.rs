//! String-keyed configuration overrides shared by every environment.
//!
//! Values come from code, from `key=value` command-line assignments, or from
//! flat key-value files (`key = value`, `#` comments). Arrays are written as
//! comma- or semicolon-separated numbers, optionally in brackets.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigValue {
    Bool(bool),
    Scalar(f64),
    Array(Vec<f64>),
    Text(String),
}

impl ConfigValue {
    /// Parses a textual value: booleans, numbers, number lists, else text.
    pub fn parse(text: &str) -> Self {
        let t = text.trim();
        match t {
            "true" => return ConfigValue::Bool(true),
            "false" => return ConfigValue::Bool(false),
            _ => {}
        }
        if let Ok(x) = t.parse::<f64>() {
            return ConfigValue::Scalar(x);
        }
        let inner = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(t);
        if inner.contains(',') || inner.contains(';') || inner.len() < t.len() {
            let parts: Option<Vec<f64>> = inner
                .split([',', ';'])
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().ok())
                .collect();
            if let Some(values) = parts {
                return ConfigValue::Array(values);
            }
        }
        ConfigValue::Text(t.to_string())
    }

    fn kind(&self) -> &'static str {
        match self {
            ConfigValue::Bool(_) => "boolean",
            ConfigValue::Scalar(_) => "number",
            ConfigValue::Array(_) => "array",
            ConfigValue::Text(_) => "text",
        }
    }
}

impl fmt::Display for ConfigValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigValue::Bool(b) => write!(f, "{b}"),
            ConfigValue::Scalar(x) => write!(f, "{x}"),
            ConfigValue::Array(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
            ConfigValue::Text(s) => write!(f, "{s}"),
        }
    }
}

impl From<bool> for ConfigValue {
    fn from(b: bool) -> Self {
        ConfigValue::Bool(b)
    }
}

impl From<f64> for ConfigValue {
    fn from(x: f64) -> Self {
        ConfigValue::Scalar(x)
    }
}

impl From<i64> for ConfigValue {
    fn from(x: i64) -> Self {
        ConfigValue::Scalar(x as f64)
    }
}

impl From<Vec<f64>> for ConfigValue {
    fn from(xs: Vec<f64>) -> Self {
        ConfigValue::Array(xs)
    }
}

impl From<&str> for ConfigValue {
    fn from(s: &str) -> Self {
        ConfigValue::Text(s.to_string())
    }
}

/// Overrides for one environment plus an optional master seed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnvConfig {
    values: BTreeMap<String, ConfigValue>,
    pub seed: Option<u64>,
}

impl EnvConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Builder form of [`EnvConfig::insert`].
    pub fn set(mut self, key: &str, value: impl Into<ConfigValue>) -> Self {
        self.insert(key, value);
        self
    }

    pub fn insert(&mut self, key: &str, value: impl Into<ConfigValue>) {
        self.values.insert(key.trim().to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&ConfigValue> {
        self.values.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && self.seed.is_none()
    }

    /// Applies one `key=value` assignment. The key `seed` sets the master seed.
    pub fn apply_assignment(&mut self, text: &str) -> Result<()> {
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| Error::config(format!("expected key=value, got '{text}'")))?;
        self.apply_pair(key.trim(), value.trim())
    }

    fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        if key.is_empty() {
            return Err(Error::config("empty configuration key"));
        }
        if key == "seed" {
            let seed = value
                .parse::<u64>()
                .map_err(|_| Error::config(format!("seed must be an unsigned integer, got '{value}'")))?;
            self.seed = Some(seed);
        } else {
            self.insert(key, ConfigValue::parse(value));
        }
        Ok(())
    }

    /// Parses a flat `key = value` file body.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = EnvConfig::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected 'key = value', got '{line}'")))?;
            cfg.apply_pair(key.trim(), value.trim()).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn from_kv_file(path: &Path) -> Result<Self> {
        Self::from_kv_text(&std::fs::read_to_string(path)?)
    }

    /// Values of `other` replace values here; `other.seed` wins when set.
    pub fn merged(&self, other: &EnvConfig) -> EnvConfig {
        let mut out = self.clone();
        for (k, v) in &other.values {
            out.values.insert(k.clone(), v.clone());
        }
        if other.seed.is_some() {
            out.seed = other.seed;
        }
        out
    }

    /// Typed view that first rejects any key outside `allowed`.
    pub fn reader<'a>(&'a self, env: &str, allowed: &[&str]) -> Result<ConfigReader<'a>> {
        if let Some(bad) = self.keys().find(|k| !allowed.contains(k)) {
            let mut valid: Vec<&str> = allowed.to_vec();
            valid.sort_unstable();
            return Err(Error::config(format!(
                "unknown key '{bad}' for {env}; valid keys: {}",
                valid.join(", ")
            )));
        }
        Ok(ConfigReader { cfg: self })
    }
}

/// Typed accessors with key names in every error message.
pub struct ConfigReader<'a> {
    cfg: &'a EnvConfig,
}

impl ConfigReader<'_> {
    fn mismatch(key: &str, want: &str, got: &ConfigValue) -> Error {
        Error::config(format!("key '{key}' expects {want}, got {} '{got}'", got.kind()))
    }

    pub fn seed(&self) -> Option<u64> {
        self.cfg.seed
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.cfg.get(key) {
            None => Ok(None),
            Some(ConfigValue::Scalar(x)) if x.is_finite() => Ok(Some(*x)),
            Some(v) => Err(Self::mismatch(key, "a finite number", v)),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        match self.cfg.get(key) {
            None => Ok(None),
            Some(ConfigValue::Scalar(x)) if *x >= 0.0 && x.fract() == 0.0 && *x <= u64::MAX as f64 => {
                Ok(Some(*x as u64))
            }
            Some(v) => Err(Self::mismatch(key, "a nonnegative integer", v)),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.u64(key)?.map(|x| x as usize))
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.cfg.get(key) {
            None => Ok(None),
            Some(ConfigValue::Bool(b)) => Ok(Some(*b)),
            Some(ConfigValue::Scalar(x)) if *x == 0.0 || *x == 1.0 => Ok(Some(*x == 1.0)),
            Some(v) => Err(Self::mismatch(key, "a boolean", v)),
        }
    }

    pub fn f64_array(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.cfg.get(key) {
            None => Ok(None),
            Some(ConfigValue::Array(xs)) if xs.iter().all(|x| x.is_finite()) => Ok(Some(xs.clone())),
            Some(ConfigValue::Scalar(x)) if x.is_finite() => Ok(Some(vec![*x])),
            Some(v) => Err(Self::mismatch(key, "a list of finite numbers", v)),
        }
    }

    pub fn u64_array(&self, key: &str) -> Result<Option<Vec<u64>>> {
        let Some(xs) = self.f64_array(key)? else { return Ok(None) };
        xs.iter()
            .map(|&x| {
                if x >= 0.0 && x.fract() == 0.0 {
                    Ok(x as u64)
                } else {
                    Err(Error::config(format!("key '{key}' expects nonnegative integers, got {x}")))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn text(&self, key: &str) -> Result<Option<String>> {
        match self.cfg.get(key) {
            None => Ok(None),
            Some(ConfigValue::Text(s)) => Ok(Some(s.clone())),
            Some(v) => Ok(Some(v.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_parse_by_shape() {
        assert_eq!(ConfigValue::parse("true"), ConfigValue::Bool(true));
        assert_eq!(ConfigValue::parse("2.5"), ConfigValue::Scalar(2.5));
        assert_eq!(ConfigValue::parse("1,2, 3"), ConfigValue::Array(vec![1.0, 2.0, 3.0]));
        assert_eq!(ConfigValue::parse("[4]"), ConfigValue::Array(vec![4.0]));
        assert_eq!(ConfigValue::parse("1;2"), ConfigValue::Array(vec![1.0, 2.0]));
        assert_eq!(ConfigValue::parse("trace.csv"), ConfigValue::Text("trace.csv".into()));
    }

    #[test]
    fn unknown_key_is_named() {
        let cfg = EnvConfig::new().set("pm_count", 10.0).set("bogus", 1.0);
        let err = cfg.reader("vm-packing", &["pm_count"]).err().unwrap().to_string();
        assert!(err.contains("'bogus'"), "{err}");
        assert!(err.contains("pm_count"), "{err}");
    }

    #[test]
    fn kv_text_with_comments_and_seed() {
        let cfg = EnvConfig::from_kv_text("# chain\nperiods = 12\nlead_times = 1, 2,3 # days\nseed=9\n\n").unwrap();
        assert_eq!(cfg.seed, Some(9));
        let r = cfg.reader("x", &["periods", "lead_times"]).unwrap();
        assert_eq!(r.usize("periods").unwrap(), Some(12));
        assert_eq!(r.u64_array("lead_times").unwrap(), Some(vec![1, 2, 3]));
    }

    #[test]
    fn kv_errors_carry_line_numbers() {
        let err = EnvConfig::from_kv_text("a = 1\nnot an assignment\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn typed_getters_reject_wrong_shapes() {
        let cfg = EnvConfig::new().set("n", 2.5).set("flag", "maybe").set("xs", vec![1.0, -1.0]);
        let r = cfg.reader("x", &["n", "flag", "xs"]).unwrap();
        assert!(r.usize("n").is_err());
        assert_eq!(r.f64("n").unwrap(), Some(2.5));
        assert!(r.bool("flag").is_err());
        assert!(r.u64_array("xs").is_err());
        assert_eq!(r.f64("missing").unwrap(), None);
    }

    #[test]
    fn assignment_and_merge() {
        let mut a = EnvConfig::new();
        a.apply_assignment("capacity=50").unwrap();
        a.apply_assignment("seed=3").unwrap();
        assert!(a.apply_assignment("capacity").is_err());
        assert!(a.apply_assignment("seed=-1").is_err());
        let b = EnvConfig::new().set("capacity", 60.0);
        let m = a.merged(&b);
        assert_eq!(m.get("capacity"), Some(&ConfigValue::Scalar(60.0)));
        assert_eq!(m.seed, Some(3));
    }
}

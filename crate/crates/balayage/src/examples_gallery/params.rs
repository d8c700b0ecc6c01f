//! Parameter parsing for gallery builders: `key=value` strings with
//! per-family defaults.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Resolved parameters of a gallery build.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    given: BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl Params {
    /// Parameters from a map.
    pub fn new(given: BTreeMap<String, String>) -> Self {
        Self { given, used: BTreeMap::new() }
    }

    /// Parses `key=value` strings.
    pub fn parse<S: AsRef<str>>(pairs: &[S]) -> Result<Self> {
        let mut given = BTreeMap::new();
        for p in pairs {
            let (k, v) = p
                .as_ref()
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("parameter `{}` is not of the form key=value", p.as_ref())))?;
            given.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self::new(given))
    }

    fn raw(&mut self, key: &str, default: &str) -> String {
        let v = self.given.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.used.insert(key.to_string(), v.clone());
        v
    }

    /// An integer parameter.
    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = self.raw(key, &default.to_string());
        v.parse().map_err(|_| Error::Parse(format!("parameter `{key}` must be a nonnegative integer, got `{v}`")))
    }

    /// A real parameter.
    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.raw(key, &default.to_string());
        v.parse().map_err(|_| Error::Parse(format!("parameter `{key}` must be a number, got `{v}`")))
    }

    /// A string parameter.
    pub fn string(&mut self, key: &str, default: &str) -> String {
        self.raw(key, default)
    }

    /// A comma-separated list of reals.
    pub fn f64_list(&mut self, key: &str, default: &str) -> Result<Vec<f64>> {
        let v = self.raw(key, default);
        v.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("parameter `{key}`: `{s}` is not a number")))
            })
            .collect()
    }

    /// A comma-separated list of integers.
    pub fn usize_list(&mut self, key: &str, default: &str) -> Result<Vec<usize>> {
        let v = self.raw(key, default);
        v.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("parameter `{key}`: `{s}` is not an integer")))
            })
            .collect()
    }

    /// Fails on parameters the family does not know; returns the resolved
    /// parameter set.
    pub fn finish(self, family: &str) -> Result<BTreeMap<String, String>> {
        if let Some(k) = self.given.keys().find(|k| !self.used.contains_key(*k)) {
            return Err(Error::contract(format!("family `{family}` has no parameter `{k}`")));
        }
        Ok(self.used)
    }
}

/// A positive sequence `(ρ_k)_{k≥0}`: constant or an explicit list.
#[derive(Debug, Clone, PartialEq)]
pub enum Sequence {
    /// `ρ_k = v` for all `k`.
    Constant(f64),
    /// `ρ_k = values[k]`; indices past the end are unavailable.
    Explicit(Vec<f64>),
}

impl Sequence {
    /// Parses `"1"` (constant) or `"1,0.5,2"` (explicit).
    pub fn parse(values: Vec<f64>, what: &str) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::contract(format!("{what} must be positive and finite")));
        }
        match values.len() {
            0 => Err(Error::contract(format!("{what} needs at least one value"))),
            1 => Ok(Sequence::Constant(values[0])),
            _ => Ok(Sequence::Explicit(values)),
        }
    }

    /// The `k`-th term.
    pub fn get(&self, k: usize) -> Result<f64> {
        match self {
            Sequence::Constant(v) => Ok(*v),
            Sequence::Explicit(v) => v.get(k).copied().ok_or_else(|| {
                Error::contract(format!("sequence has {} terms; term {k} is needed", v.len()))
            }),
        }
    }
}

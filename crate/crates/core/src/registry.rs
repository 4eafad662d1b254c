//! Name → constructor table for the maintenance strategies.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algo::arb::{ArbConfig, ArbMis};
use crate::algo::det::{DetConfig, DetMis};
use crate::algo::naive::NaiveMis;
use crate::algo::rand::{RandConfig, RandMis};
use crate::algo::MisAlgorithm;

/// Optional overrides; each strategy reads the ones it understands.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AlgorithmParams {
    pub seed: Option<u64>,
    pub c_high: Option<f64>,
    pub lambda: Option<usize>,
    pub c_replace: Option<f64>,
    pub c_feasible: Option<f64>,
    pub c_t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error("unknown algorithm `{0}` (known: {1})")]
    Unknown(String, String),
    #[error("`{0}` requires --seed")]
    MissingSeed(&'static str),
    #[error("`{0}` requires --lambda")]
    MissingLambda(&'static str),
    #[error("invalid parameter: {0}")]
    BadParam(String),
}

pub type Factory = fn(usize, &AlgorithmParams) -> Result<Box<dyn MisAlgorithm>, RegistryError>;

pub struct Registry {
    factories: BTreeMap<&'static str, Factory>,
}

fn positive(name: &str, value: Option<f64>, default: f64) -> Result<f64, RegistryError> {
    match value {
        None => Ok(default),
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(RegistryError::BadParam(format!("{name} must be positive, got {x}"))),
    }
}

fn make_naive(n: usize, _: &AlgorithmParams) -> Result<Box<dyn MisAlgorithm>, RegistryError> {
    Ok(Box::new(NaiveMis::new(n)))
}

fn make_det(n: usize, p: &AlgorithmParams) -> Result<Box<dyn MisAlgorithm>, RegistryError> {
    let c_high = positive("c_high", p.c_high, DetConfig::DEFAULT_C_HIGH)?;
    Ok(Box::new(DetMis::new(n, DetConfig { c_high })))
}

fn make_rand(n: usize, p: &AlgorithmParams) -> Result<Box<dyn MisAlgorithm>, RegistryError> {
    let seed = p.seed.ok_or(RegistryError::MissingSeed("rand"))?;
    let c_high = positive("c_high", p.c_high, RandConfig::DEFAULT_C_HIGH)?;
    Ok(Box::new(RandMis::new(n, RandConfig { c_high, seed })))
}

fn make_arb(n: usize, p: &AlgorithmParams) -> Result<Box<dyn MisAlgorithm>, RegistryError> {
    let lambda = p.lambda.ok_or(RegistryError::MissingLambda("arb"))?;
    if lambda == 0 {
        return Err(RegistryError::BadParam("lambda must be at least 1".into()));
    }
    let cfg = ArbConfig {
        lambda,
        c_t: positive("c_T", p.c_t, ArbConfig::DEFAULT_C_T)?,
        c_high: positive("c_high", p.c_high, ArbConfig::DEFAULT_C_HIGH)?,
        c_replace: positive("c_replace", p.c_replace, ArbConfig::DEFAULT_C_REPLACE)?,
        c_feasible: positive("c_feasible", p.c_feasible, ArbConfig::DEFAULT_C_FEASIBLE)?,
    };
    Ok(Box::new(ArbMis::new(n, cfg)))
}

impl Registry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    /// `naive`, `det`, `rand`, `arb`.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("naive", make_naive);
        r.register("det", make_det);
        r.register("rand", make_rand);
        r.register("arb", make_arb);
        r
    }

    /// Adds or replaces an entry.
    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.factories.insert(name, factory);
    }

    /// Registered names, sorted.
    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    pub fn create(
        &self,
        name: &str,
        n: usize,
        params: &AlgorithmParams,
    ) -> Result<Box<dyn MisAlgorithm>, RegistryError> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| RegistryError::Unknown(name.to_string(), self.names().join(", ")))?;
        factory(n, params)
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

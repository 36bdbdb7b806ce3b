//! Simulation constants.
//!
//! The JSON form is a flat object keyed by the field names below (`T` and
//! `gamma0` are spelled as in the model). Missing keys take their defaults,
//! unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Population size.
    pub n: usize,
    /// Group initiators drawn per term.
    pub k: usize,
    /// Formation ticks per term.
    #[serde(rename = "T")]
    pub ticks: usize,
    /// Base choosiness exponent.
    pub gamma0: f64,
    /// Harvest capacity of every agent.
    pub c0: f64,
    /// Initial savings.
    pub s0: f64,
    /// Food consumed by each alive agent once per term.
    pub consumption: f64,
    /// Spread between the two preference weights.
    pub alpha: f64,
    /// Fraction of complement-preferring agents.
    pub beta: f64,
    pub max_term: usize,
    /// Target mean degree of the initial friend network.
    pub d0: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 200,
            k: 40,
            ticks: 8,
            gamma0: 3.0,
            c0: 10.0,
            s0: 200.0,
            consumption: 2.0,
            alpha: 1.0,
            beta: 0.5,
            max_term: 1000,
            d0: 10.0,
            seed: 0,
        }
    }
}

fn check_unit(field: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::config(field, format!("must lie in [0, 1], got {value}")));
    }
    Ok(())
}

fn check_nonneg(field: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(Error::config(field, format!("must be finite and >= 0, got {value}")));
    }
    Ok(())
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config("n", format!("need at least 2 agents, got {}", self.n)));
        }
        if self.k >= self.n {
            return Err(Error::config(
                "k",
                format!("must be smaller than n={}, got {}", self.n, self.k),
            ));
        }
        if self.k == 0 {
            return Err(Error::config("k", "must be at least 1"));
        }
        if self.ticks == 0 {
            return Err(Error::config("T", "must be at least 1"));
        }
        check_nonneg("gamma0", self.gamma0)?;
        if self.gamma0 == 0.0 {
            return Err(Error::config("gamma0", "must be > 0 (time-pressure term takes its log)"));
        }
        check_nonneg("c0", self.c0)?;
        check_nonneg("s0", self.s0)?;
        check_nonneg("consumption", self.consumption)?;
        check_unit("alpha", self.alpha)?;
        check_unit("beta", self.beta)?;
        check_nonneg("d0", self.d0)?;
        if self.d0 >= self.n as f64 {
            return Err(Error::config(
                "d0",
                format!("must be smaller than n={}, got {}", self.n, self.d0),
            ));
        }
        Ok(())
    }

    /// Largest achievable group: the initiator plus one recruit per tick.
    pub fn max_group_size(&self) -> usize {
        self.ticks + 1
    }

    pub fn from_json_str(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg = Self::from_json_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

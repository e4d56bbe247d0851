//! Run configuration: one TOML file plus command-line overrides.
//!
//! ```toml
//! seed = 7
//! gamma = "1/20"
//! delta = "0.1"
//! node_budget = 100000000
//!
//! [tiny_bounds]
//! oracle_vertices = 18
//! exact_n = 64
//! ```

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use tritile::solver::{DEFAULT_NODE_BUDGET, DEFAULT_ORACLE_BOUND, MAX_EXACT_N};
use tritile::tiler::SolveConfig;

/// Parses `a/b` or a plain decimal such as `0.05` into an exact ratio.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>, String> {
    let text = text.trim();
    let bad = || format!("`{text}` is neither `a/b` nor a decimal");
    if let Some((a, b)) = text.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(format!("`{text}` has a zero denominator"));
        }
        return Ok(Ratio::new(a, b));
    }
    let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 18 || (whole.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
    let frac_num: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let den = 10u64.pow(frac.len() as u32);
    whole
        .checked_mul(den)
        .and_then(|w| w.checked_add(frac_num))
        .map(|num| Ratio::new(num, den))
        .ok_or_else(bad)
}

/// Ratios are written as `"a/b"` strings in config files and reports.
mod ratio_text {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        parse_ratio(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TinyBounds {
    /// Scans cross-check against the brute-force oracle up to this many
    /// vertices (`3N`).
    pub oracle_vertices: usize,
    /// Largest `N` handed to the exact search.
    pub exact_n: usize,
}

impl Default for TinyBounds {
    fn default() -> Self {
        TinyBounds { oracle_vertices: DEFAULT_ORACLE_BOUND, exact_n: MAX_EXACT_N }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(with = "ratio_text")]
    pub gamma: Ratio<u64>,
    #[serde(with = "ratio_text")]
    pub delta: Ratio<u64>,
    #[serde(with = "ratio_text")]
    pub epsilon: Ratio<u64>,
    #[serde(with = "ratio_text")]
    pub typical: Ratio<u64>,
    pub node_budget: u64,
    pub effort: usize,
    pub restarts: usize,
    pub split_retries: usize,
    pub tiny_bounds: TinyBounds,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolveConfig::default();
        RunConfig {
            seed: s.seed,
            gamma: s.gamma,
            delta: s.delta,
            epsilon: s.epsilon,
            typical: s.typical,
            node_budget: DEFAULT_NODE_BUDGET,
            effort: s.effort,
            restarts: s.restarts,
            split_retries: s.split_retries,
            tiny_bounds: TinyBounds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let zero = Ratio::new(0, 1);
        let one = Ratio::new(1, 1);
        for (name, r) in [("gamma", self.gamma), ("delta", self.delta), ("epsilon", self.epsilon), ("typical", self.typical)] {
            if r <= zero || r >= one {
                return Err(ConfigError(format!("{name} = {r} must lie strictly between 0 and 1")));
            }
        }
        for (name, v) in [
            ("node_budget", self.node_budget),
            ("effort", self.effort as u64),
            ("restarts", self.restarts as u64),
            ("tiny_bounds.oracle_vertices", self.tiny_bounds.oracle_vertices as u64),
        ] {
            if v == 0 {
                return Err(ConfigError(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn solve_config(&self, n: usize) -> SolveConfig {
        SolveConfig {
            seed: self.seed,
            gamma: self.gamma,
            delta: self.delta,
            epsilon: self.epsilon,
            typical: self.typical,
            node_budget: self.node_budget,
            effort: self.effort,
            restarts: self.restarts,
            split_retries: self.split_retries,
            exact_fallback: n <= self.tiny_bounds.exact_n,
            columns: None,
        }
    }
}

/// Hex SHA-256 of some bytes, used for graph files.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

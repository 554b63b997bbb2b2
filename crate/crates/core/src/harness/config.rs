//! Flat `key = value` run configuration (TOML syntax).

use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::SimConfig;

/// Keys accepted in a configuration file.
pub const CONFIG_KEYS: [&str; 13] = [
    "lattice_side",
    "p",
    "tau",
    "p_fund",
    "a",
    "b",
    "alpha",
    "noise_sigma",
    "rounds",
    "steps",
    "fundamental_price",
    "initial_price",
    "seed",
];

/// Parses and validates a configuration; missing keys keep their defaults.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let config: SimConfig =
        toml::from_str(text).map_err(|e| Error::config(e.message().to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Effective configuration in the same format `parse_config` reads.
pub fn emit_config(config: &SimConfig) -> Result<String> {
    config.validate()?;
    toml::to_string(config).map_err(|e| Error::config(e.to_string()))
}

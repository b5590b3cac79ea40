pub mod compare;
pub mod degree_hist;
pub mod sample;
pub mod simulate;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use gnmn::ScenarioConfig;

use crate::CliError;

/// Load, optionally reseed, and validate a scenario config.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))
        .map_err(CliError::config)?;
    let mut config = ScenarioConfig::from_json(&text)
        .with_context(|| format!("cannot parse config {}", path.display()))
        .map_err(CliError::config)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config.validate().map_err(CliError::config)?;
    Ok(config)
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
        .map_err(CliError::runtime)
}

pub fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(CliError::runtime)
}

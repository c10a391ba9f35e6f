use std::path::Path;

use anyhow::{Context, Result};
use msd_core::curation::FilterConfig;
use msd_core::metrics::MetricOptions;
use msd_core::msd::ScoreMode;
use msd_core::{Error, SynergyParams};
use serde::Deserialize;

/// Decoding options as written in the config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecodeSection {
    pub score_mode: ScoreMode,
    pub max_steps: Option<usize>,
    pub stop_token: Option<String>,
    /// Sample from the distribution with this seed instead of greedy argmax.
    pub sample_seed: Option<u64>,
}

/// Everything a run needs. Defaults, then the TOML file, then flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub filter: FilterConfig,
    pub synergy: SynergyParams,
    pub decode: DecodeSection,
    pub metrics: MetricOptions,
}

impl CliConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(CliConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(Error::Io)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        self.synergy.validate()?;
        if self.decode.max_steps == Some(0) {
            return Err(Error::Config("decode.max_steps must be at least 1".into()).into());
        }
        Ok(())
    }
}

//! Run configuration: one TOML file, optionally overridden key by key.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Algorithm;
use crate::gridworld::{Distribution, GenParams};
use crate::trainers::TrainConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub distribution: Distribution,
    pub width: u32,
    pub height: u32,
    pub train: usize,
    pub test: usize,
    pub validation: usize,
    pub seed: u64,
    pub dir: PathBuf,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            distribution: Distribution::ShiftedGaps,
            width: 200,
            height: 200,
            train: 200,
            test: 100,
            validation: 70,
            seed: 0,
            dir: PathBuf::from("data"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSettings {
    pub algorithms: Vec<Algorithm>,
    /// Directory holding `<algorithm>.params` files for the learners.
    pub models_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Seed for the uniform-random baseline.
    pub random_seed: u64,
}

impl Default for BenchSettings {
    fn default() -> Self {
        BenchSettings {
            algorithms: Algorithm::CLASSICAL.to_vec(),
            models_dir: PathBuf::from("models"),
            out_dir: PathBuf::from("out"),
            random_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSettings {
    /// Write every n-th frame; the final frame is always written.
    pub every: usize,
    pub markers: bool,
    pub path: bool,
}

impl Default for RenderSettings {
    fn default() -> Self {
        RenderSettings { every: 50, markers: false, path: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub data: DataConfig,
    pub generator: GenParams,
    pub train: TrainConfig,
    pub bench: BenchSettings,
    pub render: RenderSettings,
}

impl Config {
    /// Parses TOML text and applies `key.path=value` overrides in order.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Config> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("config: {e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: Config = toml::Value::Table(table)
            .try_into()
            .map_err(|e| Error::Config(format!("config: {e}")))?;
        cfg.train.validate()?;
        Ok(cfg)
    }

    /// Reads `path`, or starts from defaults when `path` is `None`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Config> {
        let text = match path {
            Some(p) => fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        Config::from_toml(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Writes the resolved configuration as `resolved_config.toml` in `dir`.
    pub fn write_resolved(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join("resolved_config.toml");
        fs::write(&path, self.to_toml())?;
        Ok(path)
    }
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{spec}` is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override `{spec}` has an empty key segment")));
    }
    // Bare words that are not valid TOML values are taken as strings.
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let (last, path) = parts.split_last().unwrap();
    let mut cur = table;
    for p in path {
        let next = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = next
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{spec}`: `{p}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

//! TOML experiment configs and command-line overrides.

use std::path::Path;
use std::str::FromStr;

use jumpopt_core::harness::ExperimentConfig;
use jumpopt_core::profile::JumpType;
use jumpopt_core::sim::TerrainShape;

use crate::{Error, Result};

/// Cell size used when a terrain spec gives only the block height, m.
pub const DEFAULT_BLOCK_CELL: f64 = 0.1;

/// `flat`, or `blocks:<height>[:<cell>[:<seed>]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainSpec(pub TerrainShape);

impl FromStr for TerrainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "bad terrain `{s}`; expected flat or blocks:<height>[:<cell>[:<seed>]]"
            ))
        };
        let mut parts = s.split(':');
        match parts.next() {
            Some("flat") if parts.next().is_none() => Ok(Self(TerrainShape::Flat)),
            Some("blocks") => {
                let block_height: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let cell = match parts.next() {
                    Some(c) => c.parse().map_err(|_| bad())?,
                    None => DEFAULT_BLOCK_CELL,
                };
                let seed = match parts.next() {
                    Some(c) => c.parse().map_err(|_| bad())?,
                    None => 0,
                };
                if parts.next().is_some() || !(block_height >= 0.0 && cell > 0.0) {
                    return Err(bad());
                }
                Ok(Self(TerrainShape::Blocks {
                    block_height,
                    cell,
                    seed,
                }))
            }
            _ => Err(bad()),
        }
    }
}

/// Comma-separated seed list, with `a..b` ranges (end exclusive).
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("bad seed list `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.parse().map_err(|_| bad())?;
            let b: u64 = b.parse().map_err(|_| bad())?;
            if a >= b {
                return Err(bad());
            }
            out.extend(a..b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Values given on the command line; `None` keeps the file or default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub jump_type: Option<JumpType>,
    pub iterations: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub terrain: Option<TerrainShape>,
    pub vmc_enabled: Option<bool>,
    pub f1: Option<f64>,
    pub jumps_per_episode: Option<usize>,
    pub output_dir: Option<String>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.jump_type {
            cfg.jump_type = v;
        }
        if let Some(v) = self.iterations {
            cfg.iterations = v;
        }
        if let Some(v) = &self.seeds {
            cfg.seeds = v.clone();
        }
        if let Some(v) = self.terrain {
            cfg.terrain = v;
        }
        if let Some(v) = self.vmc_enabled {
            cfg.vmc_enabled = v;
        }
        if let Some(v) = self.f1 {
            cfg.f1 = v;
        }
        if let Some(v) = self.jumps_per_episode {
            cfg.jumps_per_episode = v;
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = v.clone();
        }
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn config_to_toml(cfg: &ExperimentConfig) -> Result<String> {
    toml::to_string_pretty(cfg).map_err(|e| Error::Config(e.to_string()))
}

/// File (or defaults), then overrides, then validation.
pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => load_config(p)?,
        None => ExperimentConfig::default(),
    };
    overrides.apply(&mut cfg);
    if cfg.seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(cfg)
}

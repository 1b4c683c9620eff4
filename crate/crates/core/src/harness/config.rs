use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::controller::Gains;
use crate::profile::{JumpType, DEFAULT_F1};
use crate::sim::{ContactParams, RobotModel, SimSettings, Terrain, TerrainShape};
use crate::tpe::TpeConfig;
use crate::{Error, Result};

/// Episode timing, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeTiming {
    /// Stand under impedance + VMC before the first impulse.
    pub settle: f64,
    /// Wait after every foot is back on the ground before reading final pose.
    pub post_landing: f64,
    /// Give up waiting for a full touchdown after this long.
    pub max_landing_wait: f64,
}

impl Default for EpisodeTiming {
    fn default() -> Self {
        Self {
            settle: 1.0,
            post_landing: 1.0,
            max_landing_wait: 2.0,
        }
    }
}

/// Where the controller's contact flags come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactSource {
    /// Geometric penetration from the previous tick.
    #[default]
    GroundTruth,
    /// Normal force above 5 N on the previous tick.
    ForceThreshold,
}

/// Everything needed to run an episode or a whole study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub jump_type: JumpType,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub terrain: TerrainShape,
    pub contact: ContactParams,
    pub jumps_per_episode: usize,
    pub f1: f64,
    pub timing: EpisodeTiming,
    pub vmc_enabled: bool,
    pub contact_source: ContactSource,
    pub model: RobotModel,
    pub gains: Gains,
    pub tpe: TpeConfig,
    pub sim: SimSettings,
    pub output_dir: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            jump_type: JumpType::Forward,
            iterations: 20,
            seeds: vec![0, 1, 2, 3, 4],
            terrain: TerrainShape::Flat,
            contact: ContactParams::default(),
            jumps_per_episode: 1,
            f1: DEFAULT_F1,
            timing: EpisodeTiming::default(),
            vmc_enabled: true,
            contact_source: ContactSource::GroundTruth,
            model: RobotModel::default(),
            gains: Gains::default(),
            tpe: TpeConfig::default(),
            sim: SimSettings::default(),
            output_dir: String::from("runs"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.into()));
        if self.iterations < 1 {
            return bad("iterations must be at least 1");
        }
        if self.jumps_per_episode < 1 {
            return bad("jumps_per_episode must be at least 1");
        }
        if !(self.f1.is_finite() && self.f1 > 0.0) {
            return bad("f1 must be positive");
        }
        let t = &self.timing;
        if [t.settle, t.post_landing, t.max_landing_wait]
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return bad("episode timings must be non-negative");
        }
        if !(self.sim.dt > 0.0 && self.sim.dt <= 0.01) {
            return bad("sim dt must be in (0, 0.01]");
        }
        let c = &self.contact;
        if !(c.mu > 0.0 && c.k_n > 0.0 && c.d_n > 0.0 && c.v_slip > 0.0) {
            return bad("contact parameters must be positive");
        }
        if let TerrainShape::Blocks { block_height, cell, .. } = self.terrain {
            if !(block_height >= 0.0 && cell > 0.0) {
                return bad("block terrain needs height >= 0 and cell > 0");
            }
        }
        self.model.validate()?;
        self.gains.validate()?;
        self.tpe.validate()
    }

    /// Terrain for one episode; block layouts are reseeded per episode.
    pub fn terrain_for(&self, episode_seed: u64) -> Terrain {
        Terrain {
            shape: self.terrain,
            contact: self.contact,
        }
        .reseeded(episode_seed)
    }

    pub fn effective_gains(&self) -> Gains {
        if self.vmc_enabled {
            self.gains
        } else {
            self.gains.without_vmc()
        }
    }
}

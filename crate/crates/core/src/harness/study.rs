use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::episode::{run_episode, EpisodeResult};
use crate::profile::{bounds, JumpType, ProfileParams};
use crate::tpe::{ask, Dimension, History, SearchSpace, Trial, TrialStatus};
use crate::{Error, Result};

/// Wall-clock source; the core crate has none of its own.
pub trait Clock {
    /// Seconds since an arbitrary origin.
    fn now(&mut self) -> f64;
}

/// Always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now(&mut self) -> f64 {
        0.0
    }
}

/// Names of the optimized parameters. The unused lateral or sagittal
/// amplitude is pinned to zero.
pub fn active_dimensions(jump: JumpType) -> [&'static str; 3] {
    if jump.is_lateral() || jump.is_twist() {
        ["f0", "fy", "fz"]
    } else {
        ["f0", "fx", "fz"]
    }
}

pub fn search_space(jump: JumpType) -> SearchSpace {
    let [_, amp, _] = active_dimensions(jump);
    let amp_bounds = if amp == "fx" { bounds::FX } else { bounds::FY };
    SearchSpace {
        dims: vec![
            Dimension::new("f0", bounds::F0.0, bounds::F0.1),
            Dimension::new(amp, amp_bounds.0, amp_bounds.1),
            Dimension::new("fz", bounds::FZ.0, bounds::FZ.1),
        ],
    }
}

/// Expand an optimizer vector into full profile parameters.
pub fn params_from_vector(jump: JumpType, v: &[f64], f1: f64) -> Result<ProfileParams> {
    if v.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: v.len(),
        });
    }
    let (fx, fy) = if active_dimensions(jump)[1] == "fx" {
        (v[1], 0.0)
    } else {
        (0.0, v[1])
    };
    Ok(ProfileParams::new(v[0], fx, fy, v[2]).with_f1(f1))
}

pub fn params_to_vector(jump: JumpType, p: &ProfileParams) -> Vec<f64> {
    let amp = if active_dimensions(jump)[1] == "fx" { p.fx } else { p.fy };
    vec![p.f0, amp, p.fz]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// 1-based.
    pub iteration: usize,
    pub params: ProfileParams,
    /// Stored objective; zero on a fall.
    pub objective: f64,
    pub raw_objective: f64,
    pub fell: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrialLog {
    pub jump_type: Option<JumpType>,
    pub seed: u64,
    pub records: Vec<TrialRecord>,
}

impl TrialLog {
    pub fn best(&self) -> Option<&TrialRecord> {
        let mut best: Option<&TrialRecord> = None;
        for r in &self.records {
            if best.is_none_or(|b| r.objective > b.objective) {
                best = Some(r);
            }
        }
        best
    }

    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::NEG_INFINITY;
        self.records
            .iter()
            .map(|r| {
                best = best.max(r.objective);
                best
            })
            .collect()
    }

    /// Rebuild the optimizer history.
    pub fn history(&self, jump: JumpType) -> History {
        History {
            trials: self
                .records
                .iter()
                .map(|r| Trial {
                    params: params_to_vector(jump, &r.params),
                    objective: r.objective,
                    status: if r.fell { TrialStatus::Fall } else { TrialStatus::Ok },
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutcome {
    pub log: TrialLog,
    pub history: History,
    /// Episodes run by this call, in iteration order.
    pub episodes: Vec<EpisodeResult>,
}

fn mix(seed: u64, iteration: u64) -> u64 {
    let mut x = seed ^ iteration.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the episode run at `iteration` of study `seed`.
pub fn episode_seed(seed: u64, iteration: usize) -> u64 {
    mix(seed, 2 * iteration as u64 + 1)
}

/// Run `cfg.iterations` ask, episode, tell rounds for one seed.
pub fn optimize<C: Clock>(cfg: &ExperimentConfig, seed: u64, clock: &mut C) -> Result<StudyOutcome> {
    optimize_resume(cfg, seed, TrialLog::default(), clock)
}

/// Continue a study from an earlier log up to `cfg.iterations` records.
///
/// Each iteration draws from an RNG keyed by `(seed, iteration)`, so a resumed
/// study reproduces an uninterrupted one.
pub fn optimize_resume<C: Clock>(
    cfg: &ExperimentConfig,
    seed: u64,
    prior: TrialLog,
    clock: &mut C,
) -> Result<StudyOutcome> {
    cfg.validate()?;
    let jump = cfg.jump_type;
    if prior.jump_type.is_some_and(|j| j != jump) {
        return Err(Error::Config("resume log is for a different jump type".into()));
    }
    if !prior.records.is_empty() && prior.seed != seed {
        return Err(Error::Config("resume log is for a different seed".into()));
    }
    if prior.records.iter().enumerate().any(|(i, r)| r.iteration != i + 1) {
        return Err(Error::Config("resume log iterations are not contiguous from 1".into()));
    }
    let space = search_space(jump);
    let mut history = History::new();
    for t in prior.history(jump).trials {
        history.tell(&space, t)?;
    }
    let mut log = TrialLog {
        jump_type: Some(jump),
        seed,
        records: prior.records,
    };
    let mut episodes = Vec::new();
    let start = clock.now();
    for iteration in log.records.len() + 1..=cfg.iterations {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 2 * iteration as u64));
        let x = ask(&history, &space, &cfg.tpe, &mut rng)?;
        let params = params_from_vector(jump, &x, cfg.f1)?;
        let result = run_episode(&params, cfg, episode_seed(seed, iteration))?;
        let trial = if result.fell {
            Trial::fall(x, result.raw_objective)
        } else {
            Trial::ok(x, result.objective)
        };
        history.tell(&space, trial)?;
        log.records.push(TrialRecord {
            iteration,
            params,
            objective: result.objective,
            raw_objective: result.raw_objective,
            fell: result.fell,
            wall_time_s: clock.now() - start,
        });
        episodes.push(result);
    }
    Ok(StudyOutcome { log, history, episodes })
}

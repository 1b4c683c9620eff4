//! File formats, run directories and the `jumpopt` command line on top of
//! [`jumpopt_core`].
//!
//! A run directory looks like this:
//!
//! ```text
//! <out>/
//!   config.toml          resolved experiment config
//!   summary.csv          one row per seed
//!   seed_<s>/
//!     trials.csv         iteration, f0, f1, fx, fy, fz, objective, raw_objective, fell, wall_time_s
//!     trial_log.json     full trial log; the resume input
//!     history.json       optimizer history (f0, active amplitude, fz per trial)
//!     episodes/iter_<n>.jsonl   per-tick trajectories, when requested
//! ```

pub mod bench;
pub mod cli;
pub mod config;
pub mod export;
pub mod trajectory;

use std::path::PathBuf;
use std::time::Instant;

use jumpopt_core::harness::Clock;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Core(#[from] jumpopt_core::Error),
}

impl Error {
    /// Config and usage problems exit with 2, everything else with 1.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) => 2,
            Error::Core(e) if is_config_error(e) => 2,
            _ => 1,
        }
    }
}

fn is_config_error(e: &jumpopt_core::Error) -> bool {
    use jumpopt_core::Error as E;
    !matches!(e, E::Diverged { .. })
}

pub type Result<T> = std::result::Result<T, Error>;

/// Wall clock measured from construction.
#[derive(Debug, Clone, Copy)]
pub struct StdClock(Instant);

impl Default for StdClock {
    fn default() -> Self {
        Self(Instant::now())
    }
}

impl Clock for StdClock {
    fn now(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

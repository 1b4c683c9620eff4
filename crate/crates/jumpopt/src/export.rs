//! Run directory writers and readers.

use std::fs;
use std::path::{Path, PathBuf};

use jumpopt_core::harness::{StudyOutcome, TrialLog};
use jumpopt_core::profile::{JumpType, ProfileParams};
use jumpopt_core::tpe::History;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const CONFIG_FILE: &str = "config.toml";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const TRIALS_FILE: &str = "trials.csv";
pub const TRIAL_LOG_FILE: &str = "trial_log.json";
pub const HISTORY_FILE: &str = "history.json";
pub const EPISODES_DIR: &str = "episodes";

pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed_{seed}"))
}

pub fn episode_file(seed_dir: &Path, iteration: usize) -> PathBuf {
    seed_dir.join(EPISODES_DIR).join(format!("iter_{iteration:04}.jsonl"))
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.into(),
        source,
    }
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })?;
    write_text(path, &text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TrialRow {
    iteration: usize,
    f0: f64,
    f1: f64,
    fx: f64,
    fy: f64,
    fz: f64,
    objective: f64,
    raw_objective: f64,
    fell: bool,
    wall_time_s: f64,
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.into(),
        source,
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_trials_csv(path: &Path, log: &TrialLog) -> Result<()> {
    write_csv(
        path,
        log.records.iter().map(|r| TrialRow {
            iteration: r.iteration,
            f0: r.params.f0,
            f1: r.params.f1,
            fx: r.params.fx,
            fy: r.params.fy,
            fz: r.params.fz,
            objective: r.objective,
            raw_objective: r.raw_objective,
            fell: r.fell,
            wall_time_s: r.wall_time_s,
        }),
    )
}

/// Trials table as `(iteration, objective, fell)` rows.
pub fn read_trials_csv(path: &Path) -> Result<Vec<(usize, f64, bool)>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize::<TrialRow>()
        .map(|row| row.map(|t| (t.iteration, t.objective, t.fell)).map_err(csv_err(path)))
        .collect()
}

/// Take-off angle of a sagittal jump, degrees above horizontal.
pub fn takeoff_angle_deg(jump: JumpType, params: &ProfileParams) -> Option<f64> {
    matches!(jump, JumpType::Forward | JumpType::Backward).then(|| params.fz.abs().atan2(params.fx.abs()).to_degrees())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub seed: u64,
    pub jump_type: String,
    pub iterations: usize,
    pub falls: usize,
    pub best_iteration: usize,
    pub best_objective: f64,
    pub best_f0: f64,
    pub best_fx: f64,
    pub best_fy: f64,
    pub best_fz: f64,
    /// Mean stored objective of the random startup trials.
    pub startup_mean: f64,
    pub takeoff_angle_deg: Option<f64>,
}

pub fn summarize(log: &TrialLog, n_startup: usize) -> Option<SummaryRow> {
    let best = log.best()?;
    let jump = log.jump_type.unwrap_or(JumpType::Forward);
    let startup = &log.records[..n_startup.min(log.records.len())];
    Some(SummaryRow {
        seed: log.seed,
        jump_type: jump.name().into(),
        iterations: log.records.len(),
        falls: log.records.iter().filter(|r| r.fell).count(),
        best_iteration: best.iteration,
        best_objective: best.objective,
        best_f0: best.params.f0,
        best_fx: best.params.fx,
        best_fy: best.params.fy,
        best_fz: best.params.fz,
        startup_mean: startup.iter().map(|r| r.objective).sum::<f64>() / startup.len() as f64,
        takeoff_angle_deg: takeoff_angle_deg(jump, &best.params),
    })
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    write_csv(path, rows)
}

/// Write trials.csv, trial_log.json and history.json under `seed_<s>/`.
pub fn write_study(out: &Path, outcome: &StudyOutcome) -> Result<PathBuf> {
    let dir = seed_dir(out, outcome.log.seed);
    create_dir(&dir)?;
    write_trials_csv(&dir.join(TRIALS_FILE), &outcome.log)?;
    write_json(&dir.join(TRIAL_LOG_FILE), &outcome.log)?;
    write_json(&dir.join(HISTORY_FILE), &outcome.history)?;
    Ok(dir)
}

pub fn read_trial_log(dir: &Path) -> Result<TrialLog> {
    read_json(&dir.join(TRIAL_LOG_FILE))
}

pub fn read_history(dir: &Path) -> Result<History> {
    read_json(&dir.join(HISTORY_FILE))
}

//! `jumpopt` command line: `optimize`, `replay` and `benchmark-tpe`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jumpopt_core::harness::{
    episode_seed, optimize_resume, run_episode_observed, ExperimentConfig, StudyOutcome, TrialLog,
};
use jumpopt_core::profile::JumpType;
use jumpopt_core::tpe::TpeConfig;

use crate::bench::{benchmark, Problem};
use crate::config::{config_to_toml, load_config, parse_seeds, resolve, Overrides, TerrainSpec};
use crate::export::{self, create_dir, seed_dir, summarize, write_study, SummaryRow};
use crate::trajectory::JsonlObserver;
use crate::{Error, Result, StdClock};

#[derive(Debug, Parser)]
#[command(
    name = "jumpopt",
    version,
    about = "Optimize quadruped jump force profiles in simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one study per seed and write the run directory.
    Optimize(OptimizeArgs),
    /// Re-run one logged trial and dump its trajectory.
    Replay(ReplayArgs),
    /// Compare TPE with random search on closed-form objectives.
    BenchmarkTpe(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct StudyFlags {
    /// TOML experiment config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub jump_type: Option<JumpType>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Comma-separated seeds, `a..b` ranges allowed.
    #[arg(long)]
    pub seeds: Option<String>,
    /// `flat` or `blocks:<height>[:<cell>[:<seed>]]`.
    #[arg(long)]
    pub terrain: Option<String>,
    #[arg(long, value_enum)]
    pub vmc: Option<Switch>,
    /// Off-phase oscillator frequency, Hz.
    #[arg(long)]
    pub f1: Option<f64>,
    #[arg(long)]
    pub jumps_per_episode: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
}

impl StudyFlags {
    pub fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            jump_type: self.jump_type,
            iterations: self.iterations,
            seeds: self.seeds.as_deref().map(parse_seeds).transpose()?,
            terrain: self
                .terrain
                .as_deref()
                .map(|t| t.parse::<TerrainSpec>().map(|s| s.0))
                .transpose()?,
            vmc_enabled: self.vmc.map(|v| v == Switch::On),
            f1: self.f1,
            jumps_per_episode: self.jumps_per_episode,
            output_dir: self.out.clone(),
        })
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub study: StudyFlags,
    /// Continue studies found in the output directory.
    #[arg(long)]
    pub resume: bool,
    /// Write a trajectory file for every episode.
    #[arg(long)]
    pub dump_trajectories: bool,
    /// Keep every n-th tick in trajectory files.
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Run directory written by `optimize`.
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trial to replay; the best trial when omitted.
    #[arg(long)]
    pub iteration: Option<usize>,
    /// Trajectory output; defaults to the seed's episodes directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Also write `benchmark.csv` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse `args`, run, and map errors to exit codes (2 for usage and config).
pub fn main_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli, stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Optimize(a) => optimize_cmd(&a, stdout),
        Command::Replay(a) => replay_cmd(&a, stdout),
        Command::BenchmarkTpe(a) => bench_cmd(&a, stdout),
    }
}

fn say(stdout: &mut dyn Write, line: std::fmt::Arguments<'_>) {
    let _ = writeln!(stdout, "{line}");
}

/// Saved and requested configs must agree on everything but the iteration count.
fn check_resume_config(saved: &ExperimentConfig, cfg: &ExperimentConfig) -> Result<()> {
    let mut a = saved.clone();
    a.iterations = cfg.iterations;
    a.output_dir.clone_from(&cfg.output_dir);
    a.seeds.clone_from(&cfg.seeds);
    if &a != cfg {
        return Err(Error::Config(
            "requested config differs from the one saved in the run directory".into(),
        ));
    }
    Ok(())
}

fn study_one(cfg: &ExperimentConfig, out: &Path, seed: u64, resume: bool) -> Result<StudyOutcome> {
    let dir = seed_dir(out, seed);
    let prior = if resume && dir.join(export::TRIAL_LOG_FILE).exists() {
        export::read_trial_log(&dir)?
    } else {
        TrialLog::default()
    };
    let outcome = optimize_resume(cfg, seed, prior, &mut StdClock::default())?;
    write_study(out, &outcome)?;
    Ok(outcome)
}

pub fn optimize_cmd(a: &OptimizeArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = resolve(a.study.config.as_deref(), &a.study.overrides()?)?;
    let out = PathBuf::from(&cfg.output_dir);
    let config_path = out.join(export::CONFIG_FILE);
    if a.resume && config_path.exists() {
        check_resume_config(&load_config(&config_path)?, &cfg)?;
    }
    create_dir(&out)?;
    export::write_text(&config_path, &config_to_toml(&cfg)?)?;

    let outcomes: Vec<Result<StudyOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .seeds
            .iter()
            .map(|&seed| {
                let (cfg, out) = (&cfg, &out);
                scope.spawn(move || study_one(cfg, out, seed, a.resume))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("study thread panicked"))
            .collect()
    });

    let mut rows: Vec<SummaryRow> = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        if a.dump_trajectories {
            for record in &outcome.log.records {
                dump_episode(&cfg, &out, outcome.log.seed, record.iteration, None, a.stride)?;
            }
        }
        if let Some(row) = summarize(&outcome.log, cfg.tpe.n_startup) {
            say(
                stdout,
                format_args!(
                    "seed {}: best {:.4} at iteration {} (f0 {:.3} Hz, fx {:.1} N, fy {:.1} N, fz {:.1} N), falls {}/{}",
                    row.seed,
                    row.best_objective,
                    row.best_iteration,
                    row.best_f0,
                    row.best_fx,
                    row.best_fy,
                    row.best_fz,
                    row.falls,
                    row.iterations
                ),
            );
            if let Some(angle) = row.takeoff_angle_deg {
                say(
                    stdout,
                    format_args!("seed {}: take-off angle of best trial {angle:.1} deg", row.seed),
                );
            }
            rows.push(row);
        }
    }
    export::write_summary_csv(&out.join(export::SUMMARY_FILE), &rows)?;
    say(stdout, format_args!("wrote {}", out.display()));
    Ok(())
}

/// Re-run one trial with a trajectory observer; returns the output path and
/// whether the objective reproduced the logged value bit for bit.
pub fn dump_episode(
    cfg: &ExperimentConfig,
    out: &Path,
    seed: u64,
    iteration: usize,
    path: Option<&Path>,
    stride: usize,
) -> Result<(PathBuf, bool)> {
    let dir = seed_dir(out, seed);
    let log = export::read_trial_log(&dir)?;
    let record = log
        .records
        .iter()
        .find(|r| r.iteration == iteration)
        .ok_or_else(|| Error::Config(format!("seed {seed} has no iteration {iteration}")))?;
    let target = path
        .map(PathBuf::from)
        .unwrap_or_else(|| export::episode_file(&dir, iteration));
    if let Some(parent) = target.parent() {
        create_dir(parent)?;
    }
    let file = File::create(&target).map_err(export::io_err(&target))?;
    let mut obs = JsonlObserver::new(BufWriter::new(file), stride);
    let result = run_episode_observed(&record.params, cfg, episode_seed(seed, iteration), &mut obs)?;
    obs.finish().map_err(export::io_err(&target))?;
    let same = result.objective.to_bits() == record.objective.to_bits() && result.fell == record.fell;
    Ok((target, same))
}

pub fn replay_cmd(a: &ReplayArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&a.run.join(export::CONFIG_FILE))?;
    let log = export::read_trial_log(&seed_dir(&a.run, a.seed))?;
    let iteration = match a.iteration {
        Some(i) => i,
        None => {
            log.best()
                .ok_or_else(|| Error::Config("trial log is empty".into()))?
                .iteration
        }
    };
    let (path, same) = dump_episode(&cfg, &a.run, a.seed, iteration, a.out.as_deref(), a.stride)?;
    let record = log
        .records
        .iter()
        .find(|r| r.iteration == iteration)
        .expect("checked by dump_episode");
    say(
        stdout,
        format_args!(
            "seed {} iteration {}: objective {:.4}{}, {} the log",
            a.seed,
            iteration,
            record.objective,
            if record.fell { " (fell)" } else { "" },
            if same { "matches" } else { "DOES NOT match" }
        ),
    );
    say(stdout, format_args!("wrote {}", path.display()));
    Ok(())
}

pub fn bench_cmd(a: &BenchArgs, stdout: &mut dyn Write) -> Result<()> {
    if a.trials < 1 || a.seeds < 1 {
        return Err(Error::Config("trials and seeds must be at least 1".into()));
    }
    let config = TpeConfig::default();
    let mut rows = Vec::new();
    say(
        stdout,
        format_args!(
            "{:<14} {:>12} {:>12} {:>10} {:>10}",
            "problem", "tpe best", "random best", "tpe err", "random err"
        ),
    );
    for p in Problem::ALL {
        let row = benchmark(p, &config, a.trials, a.seeds)?;
        say(
            stdout,
            format_args!(
                "{:<14} {:>12.6} {:>12.6} {:>10.4} {:>10.4}",
                p.name(),
                row.tpe_median_best,
                row.random_median_best,
                row.tpe_median_error,
                row.random_median_error
            ),
        );
        rows.push(row);
    }
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        let path = dir.join("benchmark.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|source| Error::Csv {
            path: path.clone(),
            source,
        })?;
        for r in &rows {
            w.serialize(r).map_err(|source| Error::Csv {
                path: path.clone(),
                source,
            })?;
        }
        w.flush().map_err(export::io_err(&path))?;
    }
    Ok(())
}

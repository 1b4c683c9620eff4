use std::path::Path;
use std::process::{Command, Output};

use jumpopt::export::{self, read_trial_log, seed_dir};

fn jumpopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jumpopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn optimize(out: &Path, iterations: usize, extra: &[&str]) -> Output {
    let iterations = iterations.to_string();
    let mut args = vec![
        "optimize",
        "--iterations",
        &iterations,
        "--seeds",
        "0,3",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    jumpopt(&args)
}

/// Records with wall time zeroed.
fn records(out: &Path, seed: u64) -> Vec<jumpopt_core::harness::TrialRecord> {
    let mut log = read_trial_log(&seed_dir(out, seed)).unwrap();
    for r in &mut log.records {
        r.wall_time_s = 0.0;
    }
    log.records
}

#[test]
fn optimize_writes_the_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = optimize(&out, 3, &["--dump-trajectories", "--stride", "50"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("seed 3: best"));
    for f in [export::CONFIG_FILE, export::SUMMARY_FILE] {
        assert!(out.join(f).is_file(), "{f}");
    }
    for seed in [0, 3] {
        let dir = seed_dir(&out, seed);
        for f in [export::TRIALS_FILE, export::TRIAL_LOG_FILE, export::HISTORY_FILE] {
            assert!(dir.join(f).is_file(), "seed {seed} {f}");
        }
        let rows = export::read_trials_csv(&dir.join(export::TRIALS_FILE)).unwrap();
        assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), vec![1, 2, 3]);
        let history = export::read_history(&dir).unwrap();
        assert_eq!(history.trials.len(), 3);
        let traj = std::fs::read_to_string(export::episode_file(&dir, 2)).unwrap();
        let first: serde_json::Value = serde_json::from_str(traj.lines().next().unwrap()).unwrap();
        assert!(first.is_object());
    }
    let summary = std::fs::read_to_string(out.join(export::SUMMARY_FILE)).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let tmp = tempfile::tempdir().unwrap();
    let full = tmp.path().join("full");
    let split = tmp.path().join("split");
    assert!(optimize(&full, 7, &[]).status.success());
    assert!(optimize(&split, 4, &[]).status.success());
    let o = optimize(&split, 7, &["--resume"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for seed in [0, 3] {
        assert_eq!(records(&full, seed), records(&split, seed), "seed {seed}");
    }
}

#[test]
fn resume_rejects_a_changed_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    assert!(optimize(&out, 2, &[]).status.success());
    let o = optimize(&out, 3, &["--resume", "--jump-type", "twist-ccw"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn replay_reproduces_the_logged_trial() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    assert!(optimize(&out, 3, &[]).status.success());
    let traj = tmp.path().join("best.jsonl");
    let o = jumpopt(&[
        "replay",
        "--run",
        out.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        traj.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("matches the log"), "{}", stdout(&o));
    assert!(std::fs::read_to_string(&traj).unwrap().lines().count() > 100);
}

#[test]
fn bad_inputs_exit_with_usage_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let out = out.to_str().unwrap();
    for args in [
        vec!["optimize", "--iterations", "0", "--out", out],
        vec!["optimize", "--terrain", "gravel", "--out", out],
        vec!["optimize", "--jump-type", "sideways", "--out", out],
        vec!["optimize", "--seeds", "", "--out", out],
        vec!["frobnicate"],
    ] {
        let o = jumpopt(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "iterations = \"many\"\n").unwrap();
    let o = jumpopt(&["optimize", "--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn replay_of_a_missing_run_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = jumpopt(&["replay", "--run", tmp.path().join("none").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn benchmark_reports_both_problems() {
    let tmp = tempfile::tempdir().unwrap();
    let o = jumpopt(&[
        "benchmark-tpe",
        "--trials",
        "20",
        "--seeds",
        "3",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().count() >= 3, "{text}");
    let csv = std::fs::read_to_string(tmp.path().join("benchmark.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

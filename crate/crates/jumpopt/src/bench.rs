//! TPE against uniform random search on closed-form objectives.

use jumpopt_core::tpe::{ask, Dimension, History, SearchSpace, TpeConfig, Trial};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    /// `-(x - 0.3)²` on `[0, 1]`.
    Quadratic1d,
    /// `-((x - 0.3)² + (y + 0.5)²)` on `[0, 1] × [-1, 1]`.
    Bowl2d,
}

impl Problem {
    pub const ALL: [Problem; 2] = [Problem::Quadratic1d, Problem::Bowl2d];

    pub fn space(self) -> SearchSpace {
        let dims = match self {
            Problem::Quadratic1d => vec![Dimension::new("x", 0.0, 1.0)],
            Problem::Bowl2d => vec![Dimension::new("x", 0.0, 1.0), Dimension::new("y", -1.0, 1.0)],
        };
        SearchSpace { dims }
    }

    pub fn optimum(self) -> Vec<f64> {
        match self {
            Problem::Quadratic1d => vec![0.3],
            Problem::Bowl2d => vec![0.3, -0.5],
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        -self.optimum().iter().zip(x).map(|(o, v)| (v - o).powi(2)).sum::<f64>()
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::Quadratic1d => "quadratic-1d",
            Problem::Bowl2d => "bowl-2d",
        }
    }
}

/// One search run's history.
pub fn run_search(problem: Problem, config: &TpeConfig, trials: usize, seed: u64) -> Result<History> {
    let space = problem.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut history = History::new();
    for _ in 0..trials {
        let x = ask(&history, &space, config, &mut rng)?;
        let y = problem.eval(&x);
        history.tell(&space, Trial::ok(x, y))?;
    }
    Ok(history)
}

/// Pure random search with the same sampler as the TPE startup phase.
pub fn random_config(config: &TpeConfig, trials: usize) -> TpeConfig {
    TpeConfig {
        n_startup: trials + 1,
        ..*config
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub problem: Problem,
    pub trials: usize,
    pub seeds: usize,
    pub tpe_median_best: f64,
    pub random_median_best: f64,
    /// Median distance from the best point to the optimum.
    pub tpe_median_error: f64,
    pub random_median_error: f64,
}

impl BenchmarkRow {
    pub fn tpe_wins(&self) -> bool {
        self.tpe_median_best > self.random_median_best
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `seeds` TPE runs (seeds `0..seeds`) against `seeds` random runs (seeds
/// offset by 10⁶ so the two arms never share a stream).
pub fn benchmark(problem: Problem, config: &TpeConfig, trials: usize, seeds: u64) -> Result<BenchmarkRow> {
    let optimum = problem.optimum();
    let error = |h: &History| -> Result<f64> {
        let best = h.best()?;
        Ok(best
            .params
            .iter()
            .zip(&optimum)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt())
    };
    let mut tpe_best = Vec::new();
    let mut tpe_err = Vec::new();
    let mut rnd_best = Vec::new();
    let mut rnd_err = Vec::new();
    let random = random_config(config, trials);
    for seed in 0..seeds {
        let h = run_search(problem, config, trials, seed)?;
        tpe_best.push(h.best()?.objective);
        tpe_err.push(error(&h)?);
        let r = run_search(problem, &random, trials, 1_000_000 + seed)?;
        rnd_best.push(r.best()?.objective);
        rnd_err.push(error(&r)?);
    }
    Ok(BenchmarkRow {
        problem,
        trials,
        seeds: seeds as usize,
        tpe_median_best: median(tpe_best),
        random_median_best: median(rnd_best),
        tpe_median_error: median(tpe_err),
        random_median_error: median(rnd_err),
    })
}

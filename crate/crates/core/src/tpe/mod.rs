//! Tree-structured Parzen Estimator with an ask/tell interface.
//!
//! Objectives are maximized. Trials are split into a good set (top `gamma`
//! fraction) and a bad set, each dimension gets a Parzen mixture per set, and
//! the next point is the candidate drawn from the good mixture that maximizes
//! the product of per-dimension density ratios.

mod parzen;

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use parzen::{uniform_open, Kernel, ParzenMixture};

/// One named, closed interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl Dimension {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            lower,
            upper,
        }
    }

    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// Box-bounded search space with a uniform prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<Self> {
        let space = Self { dims };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::EmptySpace);
        }
        for d in &self.dims {
            if !(d.lower.is_finite() && d.upper.is_finite() && d.lower < d.upper) {
                return Err(Error::InvalidBounds {
                    name: d.name.clone(),
                    lower: d.lower,
                    upper: d.upper,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn check(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                got: params.len(),
            });
        }
        for (index, (d, &value)) in self.dims.iter().zip(params).enumerate() {
            if !d.contains(value) {
                return Err(Error::OutOfBounds { index, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Fall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub params: Vec<f64>,
    pub objective: f64,
    pub status: TrialStatus,
}

impl Trial {
    pub fn ok(params: Vec<f64>, objective: f64) -> Self {
        Self {
            params,
            objective,
            status: TrialStatus::Ok,
        }
    }

    pub fn fall(params: Vec<f64>, objective: f64) -> Self {
        Self {
            params,
            objective,
            status: TrialStatus::Fall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TpeConfig {
    /// Fraction of trials treated as good.
    pub gamma: f64,
    /// Trials drawn uniformly before the model is used.
    pub n_startup: usize,
    /// Candidates drawn from the good mixture per ask.
    pub n_candidates: usize,
    /// Minimum bandwidth as a fraction of the range; `None` means `1 / (1 + n)`
    /// with `n` observations in the mixture.
    pub bandwidth_floor: Option<f64>,
}

impl Default for TpeConfig {
    fn default() -> Self {
        Self {
            gamma: 0.25,
            n_startup: 5,
            n_candidates: 24,
            bandwidth_floor: None,
        }
    }
}

impl TpeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::TpeConfig("gamma must be in (0, 1)"));
        }
        if self.n_startup < 1 {
            return Err(Error::TpeConfig("n_startup must be at least 1"));
        }
        if self.n_candidates < 1 {
            return Err(Error::TpeConfig("n_candidates must be at least 1"));
        }
        if let Some(f) = self.bandwidth_floor {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::TpeConfig("bandwidth_floor must be in (0, 1]"));
            }
        }
        Ok(())
    }

    fn floor_for(&self, n: usize) -> f64 {
        self.bandwidth_floor.unwrap_or(1.0 / (1.0 + n as f64))
    }
}

/// Ordered trial history. Single owner; ask and tell are sequential.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct History {
    pub trials: Vec<Trial>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    /// Append a trial. Falls are stored with objective 0.
    pub fn tell(&mut self, space: &SearchSpace, mut trial: Trial) -> Result<()> {
        space.check(&trial.params)?;
        if trial.status == TrialStatus::Fall {
            trial.objective = 0.0;
        }
        self.trials.push(trial);
        Ok(())
    }

    /// Index of the maximum stored objective; earliest wins ties.
    pub fn best_index(&self) -> Result<usize> {
        let mut best: Option<usize> = None;
        for (i, t) in self.trials.iter().enumerate() {
            match best {
                Some(b) if self.trials[b].objective >= t.objective => {}
                _ => best = Some(i),
            }
        }
        best.ok_or(Error::EmptyHistory)
    }

    pub fn best(&self) -> Result<&Trial> {
        self.best_index().map(|i| &self.trials[i])
    }

    /// Running maximum of the stored objective.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.trials.len());
        let mut best = f64::NEG_INFINITY;
        for t in &self.trials {
            best = best.max(t.objective);
            out.push(best);
        }
        out
    }

    /// Indices of the good set: top `⌈gamma n⌉` by objective, earlier first on ties.
    pub fn split(&self, gamma: f64) -> (Vec<usize>, Vec<usize>) {
        let n = self.trials.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            self.trials[b]
                .objective
                .partial_cmp(&self.trials[a].objective)
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let n_good = ((gamma * n as f64).ceil() as usize).clamp(1, n.max(1));
        let bad = order.split_off(n_good.min(n));
        (order, bad)
    }
}

/// Per-dimension good and bad mixtures.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub good: Vec<ParzenMixture>,
    pub bad: Vec<ParzenMixture>,
}

impl Model {
    pub fn fit(history: &History, space: &SearchSpace, config: &TpeConfig) -> Self {
        let (good_idx, bad_idx) = history.split(config.gamma);
        let build = |idx: &[usize]| -> Vec<ParzenMixture> {
            space
                .dims
                .iter()
                .enumerate()
                .map(|(d, dim)| {
                    let obs: Vec<f64> = idx.iter().map(|&i| history.trials[i].params[d]).collect();
                    ParzenMixture::fit(&obs, dim.lower, dim.upper, config.floor_for(obs.len()))
                })
                .collect()
        };
        Self {
            good: build(&good_idx),
            bad: build(&bad_idx),
        }
    }

    /// `Σ_d ln l_d(x_d) − ln g_d(x_d)`.
    pub fn log_ratio(&self, x: &[f64]) -> f64 {
        self.good
            .iter()
            .zip(&self.bad)
            .zip(x)
            .map(|((l, g), &v)| l.ln_pdf(v) - g.ln_pdf(v))
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.good.iter().map(|l| l.sample(rng)).collect()
    }
}

/// Everything an ask computed, for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct AskDetail {
    pub params: Vec<f64>,
    /// `None` during startup.
    pub model: Option<Model>,
    pub candidates: Vec<Vec<f64>>,
    pub scores: Vec<f64>,
}

/// Next point to evaluate; always strictly inside the bounds.
pub fn ask<R: Rng + ?Sized>(
    history: &History,
    space: &SearchSpace,
    config: &TpeConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    ask_detailed(history, space, config, rng).map(|d| d.params)
}

pub fn ask_detailed<R: Rng + ?Sized>(
    history: &History,
    space: &SearchSpace,
    config: &TpeConfig,
    rng: &mut R,
) -> Result<AskDetail> {
    space.validate()?;
    config.validate()?;
    if history.len() < config.n_startup {
        let params = space.dims.iter().map(|d| uniform_open(rng, d.lower, d.upper)).collect();
        return Ok(AskDetail {
            params,
            model: None,
            candidates: Vec::new(),
            scores: Vec::new(),
        });
    }
    for t in &history.trials {
        space.check(&t.params)?;
    }
    let model = Model::fit(history, space, config);
    let candidates: Vec<Vec<f64>> = (0..config.n_candidates).map(|_| model.sample(rng)).collect();
    let scores: Vec<f64> = candidates.iter().map(|c| model.log_ratio(c)).collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    Ok(AskDetail {
        params: candidates[best].clone(),
        model: Some(model),
        candidates,
        scores,
    })
}

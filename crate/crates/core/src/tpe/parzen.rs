use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

/// One Gaussian kernel truncated to `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub mu: f64,
    pub sigma: f64,
}

fn std_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z * FRAC_1_SQRT_2))
}

fn std_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Equal-weight mixture of truncated Gaussians over one bounded dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ParzenMixture {
    pub lower: f64,
    pub upper: f64,
    pub kernels: Vec<Kernel>,
    /// In-bounds probability mass of each kernel, parallel to `kernels`.
    mass: Vec<f64>,
}

impl ParzenMixture {
    /// Kernels at `observations` plus one broad prior kernel at the midpoint.
    ///
    /// Each bandwidth is the gap to the nearest other point (the prior centre
    /// included), floored at `floor · range` and capped at `range`.
    pub fn fit(observations: &[f64], lower: f64, upper: f64, floor: f64) -> Self {
        let range = upper - lower;
        let mid = 0.5 * (lower + upper);
        let mut kernels = Vec::with_capacity(observations.len() + 1);
        for (i, &x) in observations.iter().enumerate() {
            let gap = observations
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &o)| (o - x).abs())
                .chain(core::iter::once((mid - x).abs()))
                .filter(|d| *d > 0.0)
                .fold(range, f64::min);
            kernels.push(Kernel {
                mu: x,
                sigma: gap.max(floor * range).min(range),
            });
        }
        kernels.push(Kernel { mu: mid, sigma: range });
        let mass = kernels
            .iter()
            .map(|k| std_cdf((upper - k.mu) / k.sigma) - std_cdf((lower - k.mu) / k.sigma))
            .collect();
        Self {
            lower,
            upper,
            kernels,
            mass,
        }
    }

    /// Density at `x`; zero outside the bounds.
    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lower || x > self.upper {
            return 0.0;
        }
        let sum: f64 = self
            .kernels
            .iter()
            .zip(&self.mass)
            .map(|(k, m)| std_pdf((x - k.mu) / k.sigma) / (k.sigma * m))
            .sum();
        sum / self.kernels.len() as f64
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.pdf(x).max(f64::MIN_POSITIVE).ln()
    }

    /// Draw strictly inside `(lower, upper)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let k = self.kernels[rng.random_range(0..self.kernels.len())];
        for _ in 0..1000 {
            let z: f64 = rng.sample(StandardNormal);
            let x = k.mu + k.sigma * z;
            if x > self.lower && x < self.upper {
                return x;
            }
        }
        uniform_open(rng, self.lower, self.upper)
    }
}

/// Uniform draw strictly inside `(lower, upper)`.
pub fn uniform_open<R: Rng + ?Sized>(rng: &mut R, lower: f64, upper: f64) -> f64 {
    loop {
        let x = rng.random_range(lower..upper);
        if x > lower {
            return x;
        }
    }
}

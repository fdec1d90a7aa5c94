//! Seeded Monte Carlo checks of the decision rules under independent normal
//! z-statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::assessment::{controlled_threshold, sceptical_z};
use crate::error::Result;
use crate::numerics::quantile;
use crate::power::{Method, PowerKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub draws: u64,
    pub hits: u64,
    pub rate: f64,
}

impl McEstimate {
    fn new(draws: u64, hits: u64) -> Self {
        McEstimate { draws, hits, rate: hits as f64 / draws as f64 }
    }

    /// Binomial standard error of the rate if the true probability is `p`.
    pub fn binomial_se(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.draws as f64).sqrt()
    }

    /// Whether `p` lies within `k` binomial standard errors of the rate.
    pub fn agrees_with(&self, p: f64, k: f64) -> bool {
        (self.rate - p).abs() <= k * self.binomial_se(p)
    }
}

fn count<F>(draws: u64, seed: u64, mut hit: F) -> McEstimate
where
    F: FnMut(f64, f64) -> bool,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..draws {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        if hit(a, b) {
            hits += 1;
        }
    }
    McEstimate::new(draws, hits)
}

/// Fraction of null pairs whose sceptical z reaches `t` (both estimates in
/// the benefit direction).
pub fn simulate_t1e(t: f64, c: f64, draws: u64, seed: u64) -> McEstimate {
    count(draws, seed, |z_o, z_r| z_r > 0.0 && sceptical_z(z_o, z_r, c).is_some_and(|z| z >= t))
}

/// Fraction of null pairs declared a success by the controlled sceptical
/// p-value at level `alpha`. The decision uses the equivalent threshold form
/// `ζ >= t_α`.
pub fn simulate_controlled_success(alpha: f64, c: f64, draws: u64, seed: u64) -> Result<McEstimate> {
    let t = controlled_threshold(alpha, c)?;
    Ok(simulate_t1e(t, c, draws, seed))
}

/// Replication power by simulation: `z_r` is drawn around `√c·z_o` with unit
/// variance (conditional) or variance `1 + c` (predictive).
pub fn simulate_power(
    z_o: f64,
    c: f64,
    alpha: f64,
    method: Method,
    kind: PowerKind,
    draws: u64,
    seed: u64,
) -> Result<McEstimate> {
    let mean = c.sqrt() * z_o;
    let sd = match kind {
        PowerKind::Conditional => 1.0,
        PowerKind::Predictive => (1.0 + c).sqrt(),
    };
    let z_alpha = quantile(1.0 - alpha);
    let t = controlled_threshold(alpha, c)?;
    Ok(count(draws, seed, |_, e| {
        let z_r = mean + sd * e;
        match method {
            Method::TwoTrials => z_o >= z_alpha && z_r >= z_alpha,
            Method::Sceptical => sceptical_z(z_o, z_r, c).is_some_and(|z| z >= t),
        }
    }))
}

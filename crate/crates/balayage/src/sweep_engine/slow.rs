//! Schedules whose cleaning error decays more slowly than any prescribed
//! sequence `δ_N → 0`, in the kernel-free regime `α = 0`.
//!
//! With `α = 0`, `w ≡ 1` and a constant profile `h`, the error after `N`
//! sweeps is `ε_N = Σ_i c_i (1 − h_i)^N`.  Sites are taken in order; for
//! each site `i` a threshold `N_i > N_{i−1}` is chosen with `δ_N ≤ c_i/2`
//! for all `N ≥ N_i`, and `h_i` is the largest value with
//! `(1 − h_i)^{N_{i+1}} ≥ 1/2`.  Then for `N_i ≤ N ≤ N_{i+1}`:
//! `δ_N ≤ c_i/2 ≤ c_i (1−h_i)^{N_{i+1}} ≤ c_i (1−h_i)^N ≤ ε_N`.
//!
//! On a finite instance the chain stops at the probe horizon `H`
//! (`δ` is given on `0..=H`), which plays the role of the last threshold.

use serde::Serialize;

use super::schedule::Schedule;
use crate::error::{Error, Result};
use crate::kernel_core::{DirtVector, Profile, SiteSet};

/// Output of [`slow_schedule`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlowSchedule {
    /// The constant schedule `h, h, h, …` on `Λ = supp c`.
    pub schedule: Schedule,
    /// The profile `h`.
    pub profile: Vec<f64>,
    /// Sites used by the construction, in order.
    pub chain_sites: Vec<usize>,
    /// Thresholds `N_1 < N_2 < … < N_{m+1} = H` (one more than the sites).
    pub thresholds: Vec<usize>,
    /// Probe horizon `H`.
    pub horizon: usize,
}

/// One violated link of the inequality chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainFailure {
    /// The sweep count `N`.
    pub n: usize,
    /// Which inequality failed (0 = first link).
    pub link: usize,
    /// Left and right side of the failed link.
    pub sides: (f64, f64),
}

/// `ε_N = Σ_i c_i (1 − h_i)^N`.
pub fn slow_epsilon(c: &[f64], h: &[f64], n: usize) -> f64 {
    c.iter().zip(h).map(|(ci, hi)| ci * (1.0 - hi).powf(n as f64)).sum()
}

/// Builds the slow schedule for dirt `c > 0` on its support and target
/// rates `delta[N]`, `N = 0..=H`.
///
/// Errors when `delta` has negative entries, or when `δ_N` does not fall
/// below `c_i/2` on a tail of the horizon for even the first site (`δ` is
/// not seen to converge to zero).
pub fn slow_schedule(c: &DirtVector, delta: &[f64]) -> Result<SlowSchedule> {
    let space = c.space();
    let lambda = c.to_signed().values().iter().map(|&v| v > 0.0).collect::<Vec<_>>();
    let lambda = SiteSet::from_mask(space, lambda)?;
    if lambda.is_empty() {
        return Err(Error::contract("slow_schedule needs dirt with nonempty support"));
    }
    if delta.is_empty() {
        return Err(Error::contract("the target sequence δ is empty"));
    }
    if delta.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(Error::contract("the target sequence δ must be finite and nonnegative"));
    }
    let horizon = delta.len() - 1;
    let sites = lambda.indices();
    if delta.iter().all(|&d| d == 0.0) {
        let profile: Vec<f64> = (0..space.len()).map(|x| if lambda.contains(x) { 1.0 } else { 0.0 }).collect();
        let schedule = Schedule::cyclic(&lambda, vec![Profile::new(space, profile.clone())?])?;
        return Ok(SlowSchedule { schedule, profile, chain_sites: sites, thresholds: vec![0, horizon], horizon });
    }
    // tail_max[N] = max_{N' ≥ N} δ_{N'} within the horizon.
    let mut tail_max = delta.to_vec();
    for n in (0..horizon).rev() {
        tail_max[n] = tail_max[n].max(tail_max[n + 1]);
    }
    let mut thresholds: Vec<usize> = Vec::new();
    let mut chain = Vec::new();
    for &x in &sites {
        let half = c.get(x) / 2.0;
        let start = thresholds.last().map_or(0, |&t| t + 1);
        match (start..=horizon).find(|&n| tail_max[n] <= half) {
            Some(n) if n < horizon => {
                thresholds.push(n);
                chain.push(x);
            }
            _ => break,
        }
    }
    if chain.is_empty() {
        return Err(Error::contract(format!(
            "δ does not fall below c/2 within the horizon {horizon}; it is not seen to converge to 0"
        )));
    }
    thresholds.push(horizon);
    let mut profile = vec![0.0; space.len()];
    for (i, &x) in chain.iter().enumerate() {
        profile[x] = half_life_strength(thresholds[i + 1]);
    }
    // Sites past the chain never matter for the bound; sweep them fully.
    for &x in &sites {
        if !chain.contains(&x) {
            profile[x] = 1.0;
        }
    }
    let schedule = Schedule::cyclic(&lambda, vec![Profile::new(space, profile.clone())?])?;
    Ok(SlowSchedule { schedule, profile, chain_sites: chain, thresholds, horizon })
}

/// Largest `h ∈ (0, 1]` with `(1 − h)^n ≥ 1/2`.
fn half_life_strength(n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut h = -(-std::f64::consts::LN_2 / n as f64).exp_m1();
    while (1.0 - h).powf(n as f64) < 0.5 {
        h *= 1.0 - 1e-12;
    }
    h
}

impl SlowSchedule {
    /// `ε_N` for this schedule.
    pub fn epsilon(&self, c: &DirtVector, n: usize) -> f64 {
        slow_epsilon(c.values(), &self.profile, n)
    }

    /// Checks `δ_N ≤ c_i/2 ≤ c_i(1−h_i)^{N_{i+1}} ≤ c_i(1−h_i)^N ≤ ε_N` for
    /// every `N ∈ [N_1, H]`; returns the first failure.
    pub fn check_chain(&self, c: &DirtVector, delta: &[f64]) -> Option<ChainFailure> {
        let cv = c.values();
        for n in self.thresholds[0]..=self.horizon.min(delta.len() - 1) {
            let i = (0..self.chain_sites.len())
                .rev()
                .find(|&i| self.thresholds[i] <= n)
                .expect("n ≥ N_1");
            let x = self.chain_sites[i];
            let h = self.profile[x];
            let sides = [
                delta[n],
                cv[x] / 2.0,
                cv[x] * (1.0 - h).powf(self.thresholds[i + 1] as f64),
                cv[x] * (1.0 - h).powf(n as f64),
                slow_epsilon(cv, &self.profile, n),
            ];
            if let Some(link) = (0..4).find(|&k| sides[k] > sides[k + 1]) {
                return Some(ChainFailure { n, link, sides: (sides[link], sides[link + 1]) });
            }
        }
        None
    }
}

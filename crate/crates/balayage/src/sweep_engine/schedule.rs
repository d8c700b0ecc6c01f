//! Cleaning schedules: sequences of profiles `h_1, h_2, …` supported in a
//! region `Λ`, and single-site scaled schedules `ε_i δ_{x_i}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel_core::{Profile, SiteSet, SiteSpace};

/// A sequence of cleaning profiles, each supported in `lambda`.
///
/// A cyclic schedule repeats its steps forever; an acyclic one ends after
/// its last step.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    lambda: SiteSet,
    steps: Vec<Profile>,
    cyclic: bool,
}

impl Schedule {
    /// A finite list of steps.
    pub fn new(lambda: &SiteSet, steps: Vec<Profile>) -> Result<Self> {
        Self::build(lambda, steps, false)
    }

    /// Steps repeated forever in order.
    pub fn cyclic(lambda: &SiteSet, steps: Vec<Profile>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::contract("a cyclic schedule needs at least one step"));
        }
        Self::build(lambda, steps, true)
    }

    fn build(lambda: &SiteSet, steps: Vec<Profile>, cyclic: bool) -> Result<Self> {
        for (i, h) in steps.iter().enumerate() {
            lambda.space().ensure_same(h.space(), "schedule step")?;
            if !h.is_supported_in(lambda) {
                return Err(Error::contract(format!(
                    "step {} is not supported in the region Λ",
                    i + 1
                )));
            }
        }
        Ok(Self { lambda: lambda.clone(), steps, cyclic })
    }

    /// The region `Λ`.
    pub fn lambda(&self) -> &SiteSet {
        &self.lambda
    }

    /// The ambient space.
    pub fn space(&self) -> &SiteSpace {
        self.lambda.space()
    }

    /// The stored steps (one period for cyclic schedules).
    pub fn steps(&self) -> &[Profile] {
        &self.steps
    }

    /// `true` when the steps repeat forever.
    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    /// Number of available steps (`None` for cyclic schedules).
    pub fn len(&self) -> Option<usize> {
        (!self.cyclic).then_some(self.steps.len())
    }

    /// `true` for a finite schedule without steps.
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Step `n ≥ 1`, or `None` past the end of a finite schedule.
    pub fn step(&self, n: usize) -> Option<&Profile> {
        if n == 0 || self.steps.is_empty() {
            return None;
        }
        if self.cyclic {
            Some(&self.steps[(n - 1) % self.steps.len()])
        } else {
            self.steps.get(n - 1)
        }
    }

    /// Ends `n_1 < n_2 < …` of consecutive blocks of steps within the
    /// first `n_steps`, each block covering `Λ` uniformly:
    /// `Σ_{i=n_{j−1}+1}^{n_j} h_i ≥ δ χ_Λ`.  Blocks are closed greedily as
    /// soon as their coverage reaches `δ` on every site of `Λ`.
    pub fn coverage_blocks(&self, delta: f64, n_steps: usize) -> Result<Vec<usize>> {
        if !(delta > 0.0) {
            return Err(Error::contract("block coverage level δ must be positive"));
        }
        let lam = self.lambda.indices();
        let mut acc = vec![0.0; self.space().len()];
        let mut ends = Vec::new();
        for n in 1..=n_steps {
            let Some(h) = self.step(n) else { break };
            h.accumulate(&mut acc);
            if lam.iter().all(|&x| acc[x] >= delta) {
                ends.push(n);
                acc.iter_mut().for_each(|a| *a = 0.0);
            }
        }
        Ok(ends)
    }
}

/// Sweeps every site of `Λ` in index order with strength `eps`, forever.
pub fn round_robin(lambda: &SiteSet, eps: f64) -> Result<Schedule> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::contract("sweep strength must lie in (0, 1]"));
    }
    if lambda.is_empty() {
        return Schedule::cyclic(lambda, vec![Profile::zeros(lambda.space())]);
    }
    let steps = lambda.iter().map(|x| Profile::point(lambda.space(), x, eps)).collect();
    Schedule::cyclic(lambda, steps)
}

/// Repeats a block of profiles, `repeats` times or forever (`None`).
pub fn block_repeat(lambda: &SiteSet, block: Vec<Profile>, repeats: Option<usize>) -> Result<Schedule> {
    match repeats {
        None => Schedule::cyclic(lambda, block),
        Some(r) => {
            let steps = (0..r).flat_map(|_| block.iter().cloned()).collect();
            Schedule::new(lambda, steps)
        }
    }
}

/// A single-site schedule `β_{ε_1 δ_{x_1}} β_{ε_2 δ_{x_2}} ⋯`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledSchedule {
    /// Sites `x_i` (dense indices), each in `Λ`.
    pub sites: Vec<usize>,
    /// Strengths `ε_i ∈ (0, 1]`.
    pub scales: Vec<f64>,
}

impl ScaledSchedule {
    /// Validates lengths, strengths and membership in `lambda`.
    pub fn new(lambda: &SiteSet, sites: Vec<usize>, scales: Vec<f64>) -> Result<Self> {
        if sites.len() != scales.len() {
            return Err(Error::dimension("sites and scales differ in length"));
        }
        if let Some(i) = scales.iter().position(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(Error::contract(format!("scale ε_{} = {} is outside (0, 1]", i + 1, scales[i])));
        }
        if let Some(&x) = sites.iter().find(|&&x| x >= lambda.space().len() || !lambda.contains(x)) {
            return Err(Error::contract(format!("scheduled site {x} is not in Λ")));
        }
        Ok(Self { sites, scales })
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    /// `true` without steps.
    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// The equivalent profile schedule `ε_i δ_{x_i}`.
    pub fn to_schedule(&self, lambda: &SiteSet) -> Result<Schedule> {
        let steps = self
            .sites
            .iter()
            .zip(&self.scales)
            .map(|(&x, &e)| Profile::point(lambda.space(), x, e))
            .collect();
        Schedule::new(lambda, steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_is_enforced() {
        let s = SiteSpace::indexed(3);
        let lam = SiteSet::from_indices(&s, [0, 1]).unwrap();
        let bad = Profile::point(&s, 2, 0.5);
        assert!(matches!(Schedule::new(&lam, vec![bad]), Err(Error::Contract(_))));
        assert!(ScaledSchedule::new(&lam, vec![2], vec![1.0]).is_err());
        assert!(ScaledSchedule::new(&lam, vec![1], vec![0.0]).is_err());
    }

    #[test]
    fn round_robin_cycles_and_blocks() {
        let s = SiteSpace::indexed(3);
        let lam = SiteSet::from_indices(&s, [0, 2]).unwrap();
        let sch = round_robin(&lam, 0.5).unwrap();
        assert_eq!(sch.step(3).unwrap(), &Profile::point(&s, 0, 0.5));
        assert_eq!(sch.step(4).unwrap(), &Profile::point(&s, 2, 0.5));
        assert_eq!(sch.coverage_blocks(1.0, 9).unwrap(), vec![4, 8]);
    }
}

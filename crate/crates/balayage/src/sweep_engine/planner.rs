//! A cleaning planner for instances where `c (I_Λ α I_Λ)^k w → 0`.
//!
//! The plan is a program of single-marker updates on `{0,1}`-valued clouds
//! starting from `ρ^0`, each converted into a single-site partial sweep by
//! the imitation step.  Inside `Λ` (the kernel restricted to `Λ × Λ`):
//!
//! 1. For tolerance `ε_j`, pick the level `N_j` past which
//!    `c a^k w ≤ ε_j` on the probe horizon.
//! 2. For each level `k ≤ N_j`, pick markers `M_{ε_j,k}` of level `k` in
//!    decreasing order of `a^η c_{x_0} w_{x_k}` until the rest weighs less
//!    than `ε_j / 2^{k+1}` (greedy, hence nested in `ε`).
//! 3. Update every not-yet-updated ancestor of those markers, level by
//!    level, shallowest first.
//!
//! After stage `j` the remaining dirt inside `Λ` is at most `2 ε_j`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use serde::Serialize;

use super::schedule::ScaledSchedule;
use crate::error::{Error, Result};
use crate::kernel_core::{DirtVector, Kernel, SiteSet, WeightVector};

/// Number of powers probed for decay.
pub const PLANNER_PROBE_HORIZON: usize = 64;
/// Decay test: the last probed value must be at most this fraction of the largest.
pub const PLANNER_DECAY_RATIO: f64 = 1e-3;
/// Largest number of markers the planner may select.
pub const PLANNER_MARKER_CAP: usize = 2_000_000;

/// One stage of a [`CleaningPlan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanStage {
    /// Tolerance `ε_j`.
    pub eps: f64,
    /// Deepest level `N_j` handled at this stage.
    pub depth: usize,
    /// Markers selected over all levels `≤ N_j`.
    pub selected: usize,
    /// Steps of the schedule after this stage.
    pub steps_end: usize,
    /// `c T_ν w` restricted to `Λ` at the end of the stage, tracked through
    /// the cloud updates.
    pub predicted_dirt: f64,
}

/// Output of [`plan_cleaning`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CleaningPlan {
    /// The single-site schedule `β_{ε_1 δ_{x_1}} β_{ε_2 δ_{x_2}} ⋯`.
    pub schedule: ScaledSchedule,
    /// Per-stage diagnostics.
    pub stages: Vec<PlanStage>,
    /// The probed values `c a^k w`, `k = 0..=PLANNER_PROBE_HORIZON`.
    pub probe: Vec<f64>,
}

#[derive(PartialEq)]
struct Node {
    mass: f64,
    path: Vec<usize>,
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // Heaviest first; ties go to the smaller marker.
        self.mass
            .total_cmp(&other.mass)
            .then_with(|| other.path.len().cmp(&self.path.len()))
            .then_with(|| other.path.cmp(&self.path))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Plans single-site sweeps driving `c β_{ε_1δ_{x_1}} ⋯ I_Λ w` below
/// `2 ε_last`, for a decreasing tolerance sequence `eps`.
///
/// Fails with [`Error::NotApplicable`] when the probe `c a^k w`,
/// `k ≤ 64`, is not finite or its last value exceeds `1e-3` times its
/// largest value (no visible decay), or when the tolerances need more
/// than [`PLANNER_MARKER_CAP`] markers or levels beyond the probe.
pub fn plan_cleaning(
    c: &DirtVector,
    w: &WeightVector,
    alpha: &Kernel,
    lambda: &SiteSet,
    eps: &[f64],
) -> Result<CleaningPlan> {
    let space = alpha.space();
    space.ensure_same(c.space(), "planner dirt")?;
    space.ensure_same(w.space(), "planner weight")?;
    space.ensure_same(lambda.space(), "planner region")?;
    if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) || eps.windows(2).any(|p| p[1] > p[0]) {
        return Err(Error::contract("tolerances must be positive and nonincreasing"));
    }
    let a = alpha.restricted_to(lambda);
    let wv: Vec<f64> = (0..space.len()).map(|x| if lambda.contains(x) { w.get(x) } else { 0.0 }).collect();
    let cv: Vec<f64> = (0..space.len()).map(|x| if lambda.contains(x) { c.get(x) } else { 0.0 }).collect();

    // powers[m] = a^m w (column vectors), probe[k] = c a^k w.
    let mut powers = vec![wv.clone()];
    for _ in 0..PLANNER_PROBE_HORIZON {
        let next = a.apply(powers.last().expect("nonempty"));
        powers.push(next);
    }
    let probe: Vec<f64> = powers.iter().map(|p| dot(&cv, p)).collect();
    let peak = probe.iter().cloned().fold(0.0f64, f64::max);
    if probe.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotApplicable("c a^k w is not finite on the probe horizon".into()));
    }
    if *probe.last().expect("nonempty") > PLANNER_DECAY_RATIO * peak {
        return Err(Error::NotApplicable(format!(
            "c a^k w does not decay over {PLANNER_PROBE_HORIZON} powers (last {:e}, largest {:e})",
            probe[PLANNER_PROBE_HORIZON], peak
        )));
    }

    let mut updated: HashSet<Vec<usize>> = HashSet::new();
    let mut dirt = cv.clone(); // c T_ν for the current cloud ν
    let mut sites = Vec::new();
    let mut scales = Vec::new();
    let mut stages = Vec::new();
    let mut total_selected = 0usize;
    for &e in eps {
        let depth = (0..=PLANNER_PROBE_HORIZON).rev().find(|&k| probe[k] > e).unwrap_or(0);
        if depth >= PLANNER_PROBE_HORIZON {
            return Err(Error::NotApplicable(format!(
                "tolerance {e:e} is not reached within {PLANNER_PROBE_HORIZON} powers"
            )));
        }
        // Ancestor sets S_{j,ℓ}, gathered per level.
        let mut by_level: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); depth + 1];
        let mut selected = 0usize;
        for k in 0..=depth {
            let budget = e / 2f64.powi(k as i32 + 1);
            for path in greedy_markers(&a, &cv, &powers, k, probe[k] - budget) {
                selected += 1;
                for l in 0..path.len() {
                    by_level[l].insert(path[..=l].to_vec());
                }
            }
            if total_selected + selected > PLANNER_MARKER_CAP {
                return Err(Error::NotApplicable(format!(
                    "tolerance {e:e} needs more than {PLANNER_MARKER_CAP} markers"
                )));
            }
        }
        total_selected += selected;
        for level in by_level {
            for path in level {
                if updated.contains(&path) {
                    continue;
                }
                let y = *path.last().expect("nonempty");
                let t_eta = cv[path[0]] * path.windows(2).map(|p| a.get(p[0], p[1])).product::<f64>();
                if t_eta > 0.0 && dirt[y] > 0.0 {
                    let eps_step = (t_eta / dirt[y]).min(1.0);
                    dirt[y] -= t_eta;
                    if dirt[y] < 0.0 {
                        dirt[y] = 0.0;
                    }
                    for &(z, v) in a.row(y) {
                        dirt[z] += t_eta * v;
                    }
                    sites.push(y);
                    scales.push(eps_step);
                }
                updated.insert(path);
            }
        }
        stages.push(PlanStage {
            eps: e,
            depth,
            selected,
            steps_end: sites.len(),
            predicted_dirt: dot(&dirt, &wv),
        });
    }
    Ok(CleaningPlan { schedule: ScaledSchedule::new(lambda, sites, scales)?, stages, probe })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Markers of level `k` in decreasing order of `a^η c_{x_0} w_{x_k}`, until
/// their total reaches `need`.  Best-first search: a node at level `ℓ` is
/// keyed by the total weight of its level-`k` descendants,
/// `c_{x_0} a^η (a^{k−ℓ} w)_{x_ℓ}`, which dominates each descendant, so
/// level-`k` markers leave the heap heaviest first.
fn greedy_markers(a: &Kernel, c: &[f64], powers: &[Vec<f64>], k: usize, need: f64) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if need <= 0.0 {
        return out;
    }
    let mut heap = BinaryHeap::new();
    for (x, &cx) in c.iter().enumerate() {
        let mass = cx * powers[k][x];
        if mass > 0.0 {
            heap.push(Node { mass, path: vec![x] });
        }
    }
    let mut got = 0.0;
    while let Some(Node { mass, path }) = heap.pop() {
        let level = path.len() - 1;
        if level == k {
            got += mass;
            out.push(path);
            if got >= need || out.len() > PLANNER_MARKER_CAP {
                break;
            }
            continue;
        }
        let y = *path.last().expect("nonempty");
        let base = mass / powers[k - level][y];
        for &(z, v) in a.row(y) {
            let m = base * v * powers[k - level - 1][z];
            if m > 0.0 {
                let mut p = path.clone();
                p.push(z);
                heap.push(Node { mass: m, path: p });
            }
        }
    }
    out
}

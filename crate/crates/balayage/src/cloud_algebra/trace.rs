//! Products `μ_n = β_{h_1} * ⋯ * β_{h_n}` of cleaning clouds and their
//! distance to `π_Λ`, pointwise and uniformly on levels.

use serde::Serialize;

use super::cloud::{profile_scalars, Cloud, MARKER_NODE_CAP};
use super::marker::all_markers;
use crate::error::{Error, Result};
use crate::kernel_core::{Profile, SiteSet};
use crate::scalar::Scalar;

/// Distances after one factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloudTraceStep {
    /// Number of factors `n`.
    pub n: usize,
    /// `max_η |μ_n(η) − π_Λ(η)|` over markers of level `≤ level_cap`.
    pub max_distance: f64,
    /// The same maximum restricted to each level `0..=level_cap`.
    pub per_level: Vec<f64>,
    /// Smallest marker attaining `max_distance`.
    pub worst_marker: Vec<String>,
}

/// Output of [`cloud_product_trace`].
#[derive(Debug, Clone)]
pub struct CloudTrace<S: Scalar> {
    /// Highest level tracked.
    pub level_cap: usize,
    /// One record per factor.
    pub steps: Vec<CloudTraceStep>,
    /// `μ_n` restricted to levels `≤ level_cap` after the last step.
    pub cloud: Cloud<S>,
}

/// Builds `μ_n = β_{h_1} * ⋯ * β_{h_n}` for `n = 1..=n_steps` (cycling
/// through `h` when `n_steps > h.len()`), truncated to levels
/// `≤ level_cap` (exact there), and records the distance to `π_Λ`.
pub fn cloud_product_trace<S: Scalar>(
    h: &[Profile],
    lambda: &SiteSet,
    level_cap: usize,
    n_steps: usize,
) -> Result<CloudTrace<S>> {
    if h.is_empty() && n_steps > 0 {
        return Err(Error::contract("cloud_product_trace needs at least one profile"));
    }
    let space = lambda.space();
    let mut betas = Vec::with_capacity(h.len());
    for (i, p) in h.iter().enumerate() {
        space.ensure_same(p.space(), "profile")?;
        if !p.is_supported_in(lambda) {
            return Err(Error::contract(format!("support of h[{i}] is not contained in Λ")));
        }
        betas.push(Cloud::<S>::beta(space, &profile_scalars::<S>(p)?)?);
    }
    let markers = all_markers(space.len(), level_cap, MARKER_NODE_CAP)?;
    let pi = Cloud::<S>::balayage(lambda);
    let mut mu = Cloud::<S>::rho(space, 0)?;
    let mut steps = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        mu = mu.convolve_truncated(&betas[(n - 1) % betas.len()], level_cap)?;
        let mut per_level = vec![0.0f64; level_cap + 1];
        let mut best = (0.0f64, &markers[0]);
        for m in &markers {
            let d = mu.value(m).sub(&pi.value(m)).abs().to_f64();
            let slot = &mut per_level[m.level()];
            *slot = slot.max(d);
            if d > best.0 {
                best = (d, m);
            }
        }
        steps.push(CloudTraceStep {
            n,
            max_distance: best.0,
            per_level,
            worst_marker: best.1.names(space),
        });
    }
    Ok(CloudTrace { level_cap, steps, cloud: mu })
}

/// `C(n, k)` as an exact integer-valued scalar.
pub fn binomial<S: Scalar>(n: u64, k: u64) -> S {
    if k > n {
        return S::zero();
    }
    // Pascal's rule keeps every intermediate value an integer.
    let mut row = vec![S::one()];
    for _ in 0..n {
        let mut next = vec![S::one(); row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1].add(&row[j]);
        }
        row = next;
    }
    row[k as usize].clone()
}

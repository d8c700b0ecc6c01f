//! The order `μ ⊴ ν ⟺ μ̃ ≤ ν̃` between clouds.

use serde::Serialize;

use super::cloud::{Cloud, MARKER_NODE_CAP};
use super::marker::{for_each_marker, Marker};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Outcome of [`order_leq`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderResult {
    /// `true` iff `μ̃(η) ≤ ν̃(η)` on every marker examined.
    pub holds: bool,
    /// The smallest marker (by level, then lexicographically) with
    /// `μ̃(η) > ν̃(η)`, when one exists.
    #[serde(skip)]
    pub witness: Option<Marker>,
    /// Site names of the witness.
    pub witness_path: Option<Vec<String>>,
    /// `true` when the verdict covers all markers, not just those examined.
    pub complete: bool,
    /// Highest level examined (`None` when the check needed no enumeration).
    pub level_cap_used: Option<usize>,
}

/// Decides `μ ⊴ ν`, i.e. `μ̃(η) ≤ ν̃(η)` for every marker `η`.
///
/// * Two finite clouds: the difference `d = μ − ν` has `d̃` constant past
///   its support along every branch, so checking the support markers of
///   `d` is complete and yields the smallest violating marker.
/// * Finite clouds and `π_Λ`: cumulatives stabilize once a branch passes
///   level `N + 1` (with `N` the largest finite level bound), so
///   enumerating markers up to `level_cap ≥ N + 1` is complete.
/// * Any other combination is checked on every marker of level
///   `≤ level_cap`; a violation is conclusive, but its absence is
///   reported as an inconclusive error.
///
/// Float weights are compared with relative tolerance `1e-12`; dyadic
/// weights exactly.
pub fn order_leq<S: Scalar>(mu: &Cloud<S>, nu: &Cloud<S>, level_cap: usize) -> Result<OrderResult> {
    mu.space().ensure_same(nu.space(), "order comparison")?;
    let space = mu.space();
    let result = |witness: Option<Marker>, complete: bool, cap: Option<usize>| OrderResult {
        holds: witness.is_none(),
        witness_path: witness.as_ref().map(|m| m.names(space)),
        witness,
        complete,
        level_cap_used: cap,
    };
    if mu.is_finite() && nu.is_finite() {
        let d = mu.sub(nu)?;
        let support = d.entries().expect("finite difference");
        for eta in support.keys() {
            if !mu.cumulative(eta).le_approx(&nu.cumulative(eta)) {
                return Ok(result(Some(eta.clone()), true, None));
            }
        }
        return Ok(result(None, true, None));
    }
    let mut witness = None;
    for_each_marker(space.len(), level_cap, MARKER_NODE_CAP, |eta| {
        if mu.cumulative(eta).le_approx(&nu.cumulative(eta)) {
            true
        } else {
            witness = Some(eta.clone());
            false
        }
    })?;
    if witness.is_some() {
        return Ok(result(witness, true, Some(level_cap)));
    }
    let needed = [mu, nu].iter().filter_map(|c| c.level_bound()).max().unwrap_or(0) + 1;
    if mu.is_finite_or_balayage() && nu.is_finite_or_balayage() && level_cap >= needed {
        return Ok(result(None, true, Some(level_cap)));
    }
    Err(Error::Inconclusive(format!(
        "no violation up to level {level_cap}, but the cumulatives of {:?} and {:?} clouds \
         need not stabilize there (complete checks need finite clouds or π_Λ and a cap ≥ {needed})",
        mu.kind(),
        nu.kind()
    )))
}

//! Class membership of finite clouds: `ℛ`, `𝒫`, `𝒮_a`, carried by `Λ`
//! and `Λ`-regular, each with a concrete witness when it fails.

use std::collections::HashMap;

use serde::Serialize;

use super::cloud::{Cloud, MARKER_NODE_CAP};
use super::marker::{all_markers, Marker};
use crate::error::{Error, Result};
use crate::kernel_core::SiteSet;
use crate::scalar::Scalar;

/// A pair of markers witnessing a failed comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness {
    /// The first marker (for `𝒫`: the longer marker `η`).
    pub marker: Vec<String>,
    /// The second marker (for `𝒫`: the subsequence `η′`).
    pub other: Vec<String>,
}

/// Class-membership report of a finite cloud.
///
/// Every check is complete for a cloud supported on levels `≤ N`: it
/// examines all markers up to level `N + 1` (`level_cap`), past which the
/// cumulative distribution is constant along every branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloudClassReport {
    /// Level bound `N` of the cloud.
    pub level_bound: usize,
    /// Highest marker level examined (`N + 1`).
    pub level_cap: usize,
    /// All weights `≥ 0`.
    pub nonnegative: bool,
    /// Smallest marker with a negative weight.
    pub negative_witness: Option<Vec<String>>,
    /// `⫴ν⫴ = sup_η Σ_{σ≼η} |ν_σ|`.
    pub norm: f64,
    /// Exact rendering of the norm.
    pub norm_exact: String,
    /// `ρ^1 * ν ⊴ ν`, i.e. `ν̃(η_1^k) ≤ ν̃(η)` for every marker of level `k ≥ 1`.
    pub in_r: bool,
    /// Smallest marker `η` violating the suffix condition.
    pub r_witness: Option<Vec<String>>,
    /// `ν̃(η′) ≤ ν̃(η)` for every subsequence `η′` of `η`.
    pub in_p: bool,
    /// Smallest pair `(η, η′)` violating the subsequence condition.
    pub p_witness: Option<PairWitness>,
    /// The branch supremum `M_ν(η) = sup_{ζ≽η} ν̃(ζ)` is constant.
    pub in_s: bool,
    /// The constant value `a` of `M_ν` when `in_s`.
    pub s_value: Option<f64>,
    /// Exact rendering of `a`.
    pub s_value_exact: Option<String>,
    /// Two markers with different branch suprema.
    pub s_witness: Option<PairWitness>,
    /// `ν_η = 0` whenever an entry before the last lies outside `Λ`.
    pub carried_by: Option<bool>,
    /// Smallest charged marker re-entering from outside `Λ`.
    pub carried_witness: Option<Vec<String>>,
    /// `ν ≥ 0`, `⫴ν⫴ ≤ 1` and `ν̃ = 1` on `∂Λ`.
    pub lambda_regular: Option<bool>,
    /// Smallest marker of `∂Λ` with `ν̃ ≠ 1`.
    pub regular_witness: Option<Vec<String>>,
    /// Which regularity condition failed.
    pub regular_reason: Option<String>,
}

/// Classifies a finite cloud; `lambda` enables the carried-by and
/// regularity checks.
pub fn classify<S: Scalar>(nu: &Cloud<S>, lambda: Option<&SiteSet>) -> Result<CloudClassReport> {
    let map = nu
        .entries()
        .ok_or_else(|| Error::contract("classification needs a finite cloud with a level bound"))?;
    let space = nu.space();
    if let Some(l) = lambda {
        space.ensure_same(l.space(), "region")?;
    }
    let n_bound = nu.level_bound().unwrap_or(0);
    let cap = n_bound + 1;
    let markers = all_markers(space.len(), cap, MARKER_NODE_CAP)?;
    let names = |m: &Marker| m.names(space);

    // Cumulatives over every marker up to the cap, by prefix recursion.
    let mut cumul: HashMap<Marker, S> = HashMap::with_capacity(markers.len());
    for m in &markers {
        let own = map.get(m).cloned().unwrap_or_else(S::zero);
        let v = match m.parent() {
            Some(p) => cumul[&p].add(&own),
            None => own,
        };
        cumul.insert(m.clone(), v);
    }
    let cum = |m: &Marker| -> S {
        // Markers above the cap are never needed: subsequences are shorter.
        cumul.get(m).cloned().unwrap_or_else(|| nu.cumulative(m))
    };

    let negative = map.iter().find(|(_, w)| w.is_negative()).map(|(m, _)| m.clone());
    let norm = nu.norm()?.expect("finite clouds have finite norm");

    let r_witness = markers
        .iter()
        .filter(|m| m.level() >= 1)
        .find(|m| !cum(&m.suffix(1)).le_approx(&cum(m)))
        .cloned();

    let mut p_witness = None;
    'outer: for m in &markers {
        let here = cum(m);
        for sub in m.proper_subsequences() {
            if !cum(&sub).le_approx(&here) {
                p_witness = Some(PairWitness { marker: names(m), other: names(&sub) });
                break 'outer;
            }
        }
    }

    // Branch suprema M(η) on levels ≤ N, from the leaves upward; beyond N
    // the cumulative is constant, so these determine M everywhere.
    let mut sup: HashMap<Marker, S> = HashMap::new();
    for m in markers.iter().rev().filter(|m| m.level() <= n_bound) {
        let mut best = cum(m);
        if m.level() < n_bound {
            for y in 0..space.len() {
                best = best.max_of(&sup[&m.child(y)]);
            }
        }
        sup.insert(m.clone(), best);
    }
    let first = Marker::single(0);
    let a = sup[&first].clone();
    let s_bad = markers.iter().filter(|m| m.level() <= n_bound).find(|m| !sup[*m].eq_approx(&a)).cloned();

    let (carried_by, carried_witness) = match lambda {
        Some(l) => {
            let w = map
                .keys()
                .find(|m| m.path()[..m.level()].iter().any(|&x| !l.contains(x)))
                .cloned();
            (Some(w.is_none()), w.map(|m| names(&m)))
        }
        None => (None, None),
    };

    let (lambda_regular, regular_witness, regular_reason) = match lambda {
        Some(l) => {
            if negative.is_some() {
                (Some(false), negative.as_ref().map(names), Some("negative weight".to_string()))
            } else if !norm.le_approx(&S::one()) {
                (Some(false), None, Some(format!("cloud norm {norm} exceeds 1")))
            } else {
                let bad = markers
                    .iter()
                    .filter(|m| {
                        let p = m.path();
                        p[..p.len() - 1].iter().all(|&x| l.contains(x)) && !l.contains(m.last())
                    })
                    .find(|m| !cum(m).eq_approx(&S::one()))
                    .cloned();
                match bad {
                    Some(m) => (
                        Some(false),
                        Some(names(&m)),
                        Some("cumulative differs from 1 on the exit boundary".to_string()),
                    ),
                    None => (Some(true), None, None),
                }
            }
        }
        None => (None, None, None),
    };

    Ok(CloudClassReport {
        level_bound: n_bound,
        level_cap: cap,
        nonnegative: negative.is_none(),
        negative_witness: negative.as_ref().map(names),
        norm: norm.to_f64(),
        norm_exact: norm.to_string(),
        in_r: r_witness.is_none(),
        r_witness: r_witness.as_ref().map(names),
        in_p: p_witness.is_none(),
        p_witness,
        in_s: s_bad.is_none(),
        s_value: s_bad.is_none().then(|| a.to_f64()),
        s_value_exact: s_bad.is_none().then(|| a.to_string()),
        s_witness: s_bad.map(|m| PairWitness { marker: names(&first), other: names(&m) }),
        carried_by,
        carried_witness,
        lambda_regular,
        regular_witness,
        regular_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::SiteSpace;
    use crate::scalar::Dyadic;

    #[test]
    fn beta_products_are_regular_and_in_p() {
        let s = SiteSpace::new(["x", "y", "z"]).unwrap();
        let lam = SiteSet::from_indices(&s, [0, 1]).unwrap();
        let h = [Dyadic::pow2_neg(1), Dyadic::one(), Dyadic::zero()];
        let b = Cloud::beta(&s, &h).unwrap();
        let b2 = b.convolve(&b).unwrap();
        let r = classify(&b2, Some(&lam)).unwrap();
        assert!(r.nonnegative && r.in_p && r.in_r && r.in_s);
        assert_eq!(r.s_value, Some(1.0));
        assert_eq!(r.lambda_regular, Some(true));
        assert_eq!(r.carried_by, Some(true));
    }

    #[test]
    fn support_outside_region_breaks_regularity() {
        let s = SiteSpace::new(["x", "y"]).unwrap();
        let lam = SiteSet::from_indices(&s, [0]).unwrap();
        let b = Cloud::<f64>::beta(&s, &[0.0, 0.5]).unwrap();
        let r = classify(&b, Some(&lam)).unwrap();
        assert_eq!(r.lambda_regular, Some(false));
        assert_eq!(r.carried_by, Some(false));
        assert_eq!(r.carried_witness, Some(vec!["y".to_string(), "x".to_string()]));
    }
}

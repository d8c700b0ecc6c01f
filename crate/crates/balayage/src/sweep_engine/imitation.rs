//! Single-marker updates of nonnegative clouds and the matching
//! single-site cleaning step.
//!
//! A single-marker update at `η` with amount `κ ∈ [0, ν(η)]` moves `κ` from
//! `η` to every child `η·z`.  Writing `y = last(η)`, the operator effect
//! on dirt is a partial sweep of `y`: `c T_{ν′} = c T_ν β_{ε δ_y}` with
//! `ε = κ (c T_η)_y / (c T_ν)_y`.

use crate::cloud_algebra::{marker_weight, realize_left, Cloud, Marker};
use crate::error::{Error, Result};
use crate::kernel_core::Kernel;

/// The cloud `ν′` obtained from `ν` by a single-marker update at `eta`
/// moving `kappa`.
pub fn single_marker_update(nu: &Cloud<f64>, eta: &Marker, kappa: f64) -> Result<Cloud<f64>> {
    let here = nu.value(eta);
    if !(0.0..=here).contains(&kappa) {
        return Err(Error::contract(format!("update amount {kappa} is outside [0, ν(η)] = [0, {here}]")));
    }
    let n = nu.space().len();
    let mut entries: Vec<(Marker, f64)> = nu.require_finite("single-marker update")?.iter().map(|(m, w)| (m.clone(), *w)).collect();
    entries.push((eta.clone(), -kappa));
    entries.extend((0..n).map(|z| (eta.child(z), kappa)));
    Cloud::finite(nu.space(), entries)
}

/// The sweep strength `ε ∈ [0, 1]` with `c T_{ν′} = c T_ν β_{ε δ_y}` for the
/// single-marker update of `nu` at `eta` by `kappa`, where `y = last(η)`.
///
/// `ε = 0` when `κ = 0` or `(c T_η)_y = 0`; otherwise
/// `ε = κ (c T_η)_y / (c T_ν)_y`, which is at most 1 because
/// `(c T_ν)_y ≥ ν(η) (c T_η)_y`.  Debug builds re-check the identity.
pub fn imitation_epsilon(c: &[f64], nu: &Cloud<f64>, eta: &Marker, kappa: f64, alpha: &Kernel) -> Result<f64> {
    nu.space().ensure_same(alpha.space(), "imitation step")?;
    if c.len() != alpha.dim() {
        return Err(Error::dimension("dirt vector has the wrong length"));
    }
    if !nu.is_nonnegative()? {
        return Err(Error::contract("the cloud must be nonnegative"));
    }
    let here = nu.value(eta);
    if !(0.0..=here).contains(&kappa) {
        return Err(Error::contract(format!("κ = {kappa} is outside [0, ν(η)] = [0, {here}]")));
    }
    let y = eta.last();
    let t_eta = c[eta.first()] * marker_weight(alpha, eta);
    if kappa == 0.0 || t_eta == 0.0 {
        return Ok(0.0);
    }
    let ct_nu = realize_left(c, nu, alpha)?;
    let eps = (kappa * t_eta / ct_nu[y]).min(1.0);
    #[cfg(debug_assertions)]
    {
        let lhs = realize_left(c, &single_marker_update(nu, eta, kappa)?, alpha)?;
        let mut rhs = ct_nu.clone();
        super::run::sweep_site(alpha, &mut rhs, y, eps);
        let scale = lhs.iter().chain(&rhs).fold(1.0f64, |m, v| m.max(v.abs()));
        debug_assert!(
            lhs.iter().zip(&rhs).all(|(a, b)| (a - b).abs() <= 1e-10 * scale),
            "imitation identity failed"
        );
    }
    Ok(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::SiteSpace;

    #[test]
    fn trivial_cases() {
        let s = SiteSpace::indexed(2);
        let k = Kernel::new(&s, [(0, 1, 0.5), (1, 0, 0.25)]).unwrap();
        let rho0 = Cloud::<f64>::rho(&s, 0).unwrap();
        let x = Marker::single(0);
        let c = [1.0, 2.0];
        assert_eq!(imitation_epsilon(&c, &rho0, &x, 0.0, &k).unwrap(), 0.0);
        assert_eq!(imitation_epsilon(&c, &rho0, &x, 1.0, &k).unwrap(), 1.0);
        assert!(matches!(imitation_epsilon(&c, &rho0, &x, 1.5, &k), Err(Error::Contract(_))));
    }

    #[test]
    fn partial_update_matches_partial_sweep() {
        let s = SiteSpace::indexed(2);
        let k = Kernel::new(&s, [(0, 1, 0.5), (1, 0, 0.25), (1, 1, 0.5)]).unwrap();
        let rho0 = Cloud::<f64>::rho(&s, 0).unwrap();
        let nu = single_marker_update(&rho0, &Marker::single(1), 1.0).unwrap();
        let eta = Marker::new(vec![1, 1]).unwrap();
        let c = [1.0, 2.0];
        let eps = imitation_epsilon(&c, &nu, &eta, 0.5, &k).unwrap();
        let lhs = realize_left(&c, &single_marker_update(&nu, &eta, 0.5).unwrap(), &k).unwrap();
        let mut rhs = realize_left(&c, &nu, &k).unwrap();
        crate::sweep_engine::run::sweep_site(&k, &mut rhs, 1, eps);
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}

//! Operator realization `T_ν = Σ_η ν_η T_η` of a cloud on a kernel.

use nalgebra::DMatrix;

use super::cloud::Cloud;
use super::marker::Marker;
use crate::dense::balayage_exact;
use crate::error::{Error, Result};
use crate::kernel_core::Kernel;
use crate::scalar::Scalar;

/// The single entry of `T_η = I_{x_0} α I_{x_1} ⋯ α I_{x_k}`:
/// `Π_i α_{x_i x_{i+1}}` at position `(x_0, x_k)`.
pub fn marker_weight(alpha: &Kernel, eta: &Marker) -> f64 {
    eta.path().windows(2).map(|w| alpha.get(w[0], w[1])).product()
}

/// `T_ν` as a dense matrix.
///
/// Finite clouds are summed marker by marker; `π_Λ` realizes as the exact
/// balayage `Π_Λ`.  Other clouds with infinite support have no closed form
/// and are rejected.
pub fn realize<S: Scalar>(nu: &Cloud<S>, alpha: &Kernel) -> Result<DMatrix<f64>> {
    nu.space().ensure_same(alpha.space(), "realization")?;
    if let Some(lambda) = nu.balayage_region() {
        return balayage_exact(alpha, lambda);
    }
    let map = nu.entries().ok_or_else(|| {
        Error::NotImplemented(format!(
            "realization of a {:?} cloud; truncate it to finitely many levels first",
            nu.kind()
        ))
    })?;
    let n = alpha.dim();
    let mut t = DMatrix::zeros(n, n);
    for (eta, w) in map {
        let a = marker_weight(alpha, eta);
        if a != 0.0 {
            t[(eta.first(), eta.last())] += w.to_f64() * a;
        }
    }
    Ok(t)
}

/// `c T_ν` for a row vector `c`, without forming the matrix (finite clouds).
pub fn realize_left<S: Scalar>(c: &[f64], nu: &Cloud<S>, alpha: &Kernel) -> Result<Vec<f64>> {
    nu.space().ensure_same(alpha.space(), "realization")?;
    let map = nu.require_finite("left realization")?;
    if c.len() != alpha.dim() {
        return Err(Error::dimension("dirt vector has the wrong length"));
    }
    let mut out = vec![0.0; alpha.dim()];
    for (eta, w) in map {
        let cx = c[eta.first()];
        if cx != 0.0 {
            out[eta.last()] += cx * w.to_f64() * marker_weight(alpha, eta);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::SiteSpace;

    #[test]
    fn rho_realizes_as_powers() {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 0.5), (1, 2, 0.25), (2, 0, 1.0), (1, 1, 0.125)]).unwrap();
        let a = k.to_dense();
        let t2 = realize(&Cloud::<f64>::rho(&s, 2).unwrap(), &k).unwrap();
        assert!((t2 - &a * &a).abs().max() < 1e-15);
        let f = [0.25, 0.5, 1.0];
        let ti = realize(&Cloud::indicator(&s, &f).unwrap(), &k).unwrap();
        assert_eq!(ti, crate::dense::diag(&f));
    }

    #[test]
    fn infinite_clouds_are_rejected() {
        let s = SiteSpace::indexed(2);
        let k = Kernel::zero(&s);
        assert!(matches!(realize(&Cloud::<f64>::one(&s), &k), Err(Error::NotImplemented(_))));
    }
}

//! Weighted vector and operator norms.
//!
//! For a weight `w > 0`, dirt is measured by `‖c‖_w = Σ_x |c_x| w_x` and
//! operators by the induced norm `‖A‖_{w→w} = max_x w_x⁻¹ Σ_y |A_xy| w_y`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel_core::kernel::{Kernel, KernelView};
use crate::kernel_core::vectors::{SignedVector, WeightVector};

/// Anything with rows that can be paired against a weight vector.
pub trait WeightedRows {
    /// Number of rows (and columns: the operator is square).
    fn n_rows(&self) -> usize;
    /// `Σ_y |A_xy| w_y` for row `x`.
    fn weighted_abs_row(&self, x: usize, w: &[f64]) -> f64;
}

impl WeightedRows for Kernel {
    fn n_rows(&self) -> usize {
        self.dim()
    }
    fn weighted_abs_row(&self, x: usize, w: &[f64]) -> f64 {
        self.row(x).iter().map(|&(j, v)| v * w[j]).sum()
    }
}

impl WeightedRows for KernelView<'_> {
    fn n_rows(&self) -> usize {
        self.dim()
    }
    fn weighted_abs_row(&self, x: usize, w: &[f64]) -> f64 {
        self.row(x).map(|(j, v)| v * w[j]).sum()
    }
}

impl WeightedRows for DMatrix<f64> {
    fn n_rows(&self) -> usize {
        self.nrows()
    }
    fn weighted_abs_row(&self, x: usize, w: &[f64]) -> f64 {
        self.row(x).iter().zip(w).map(|(a, b)| a.abs() * b).sum()
    }
}

/// `‖c‖_w = Σ_x |c_x| w_x`.
pub fn weighted_vector_norm(c: &SignedVector, w: &WeightVector) -> Result<f64> {
    c.space().ensure_same(w.space(), "weighted_vector_norm")?;
    Ok(wnorm(c.values(), w.values()))
}

/// `Σ_x |c_x| w_x` on raw slices of equal length.
#[inline]
pub fn wnorm(c: &[f64], w: &[f64]) -> f64 {
    c.iter().zip(w).map(|(a, b)| a.abs() * b).sum()
}

/// `max_x |v_x| / w_x` on raw slices: the `w`-sup norm of a column vector.
#[inline]
pub fn sup_ratio(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| a.abs() / b).fold(0.0, f64::max)
}

/// `‖A‖_{w→w} = max_x w_x⁻¹ Σ_y |A_xy| w_y`.
pub fn weighted_operator_norm<A: WeightedRows + ?Sized>(a: &A, w: &WeightVector) -> Result<f64> {
    if a.n_rows() != w.len() {
        return Err(Error::dimension(format!(
            "operator has {} rows but the weight has {} entries",
            a.n_rows(),
            w.len()
        )));
    }
    let wv = w.values();
    Ok((0..a.n_rows()).map(|x| a.weighted_abs_row(x, wv) / wv[x]).fold(0.0, f64::max))
}

/// `true` iff `(αw)_x ≤ w_x + tol·w_x` for every site `x`.
pub fn is_subinvariant(alpha: &Kernel, w: &WeightVector, tol: f64) -> Result<bool> {
    alpha.space().ensure_same(w.space(), "is_subinvariant")?;
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::contract("tolerance must be nonnegative"));
    }
    let wv = w.values();
    Ok((0..alpha.dim()).all(|x| alpha.weighted_abs_row(x, wv) <= wv[x] * (1.0 + tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::space::SiteSpace;

    #[test]
    fn vector_norm_examples() {
        let s = SiteSpace::indexed(2);
        let w = WeightVector::new(&s, vec![3.0, 4.0]).unwrap();
        let c = SignedVector::new(&s, vec![1.0, 2.0]).unwrap();
        assert_eq!(weighted_vector_norm(&c, &w).unwrap(), 11.0);
        assert_eq!(weighted_vector_norm(&SignedVector::zeros(&s), &w).unwrap(), 0.0);
        let other = SiteSpace::indexed(3);
        assert!(weighted_vector_norm(&SignedVector::zeros(&other), &w).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        let s = SiteSpace::indexed(2);
        let w = WeightVector::ones(&s);
        let a = Kernel::new(&s, [(0, 1, 2.0)]).unwrap();
        assert_eq!(weighted_operator_norm(&a, &w).unwrap(), 2.0);
        let id = DMatrix::<f64>::identity(2, 2);
        let w2 = WeightVector::new(&s, vec![0.3, 7.0]).unwrap();
        assert_eq!(weighted_operator_norm(&id, &w2).unwrap(), 1.0);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.25, -0.5]));
        assert_eq!(weighted_operator_norm(&diag, &w2).unwrap(), 0.5);
    }

    #[test]
    fn subinvariance_examples() {
        let s = SiteSpace::indexed(2);
        let w = WeightVector::ones(&s);
        assert!(is_subinvariant(&Kernel::zero(&s), &w, 0.0).unwrap());
        let a = Kernel::new(&s, [(0, 1, 1.0)]).unwrap();
        assert!(is_subinvariant(&a, &w, 0.0).unwrap());
        let b = Kernel::new(&s, [(0, 0, 1.0), (0, 1, 0.5)]).unwrap();
        assert!(!is_subinvariant(&b, &w, 1e-10).unwrap());
    }
}

//! Cleaning operators `β_f = I_{1−f} + I_f α` and their duals
//! `β*_f = I_{1−f} + α I_f`, applied sparsely to dirt vectors.

use crate::error::Result;
use crate::kernel_core::{DirtVector, Kernel, Profile, SignedVector};

/// A cleaning operator `β_f` (or its dual `β*_f` when `dual` is set).
///
/// Dirt vectors act on the left: cleaning site `x` with strength `f_x`
/// keeps the fraction `1 − f_x` of its dirt and sends the fraction `f_x`
/// through row `x` of the kernel.
#[derive(Debug, Clone)]
pub struct CleaningOperator {
    profile: Profile,
    kernel: Kernel,
    dual: bool,
}

impl CleaningOperator {
    /// `β_f`.
    pub fn new(kernel: &Kernel, profile: &Profile) -> Result<Self> {
        kernel.space().ensure_same(profile.space(), "cleaning operator")?;
        Ok(Self { profile: profile.clone(), kernel: kernel.clone(), dual: false })
    }

    /// `β*_f`.
    pub fn dual(kernel: &Kernel, profile: &Profile) -> Result<Self> {
        kernel.space().ensure_same(profile.space(), "dual cleaning operator")?;
        Ok(Self { profile: profile.clone(), kernel: kernel.clone(), dual: true })
    }

    /// The profile `f`.
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// The kernel `α`.
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// `true` for `β*_f`.
    pub fn is_dual(&self) -> bool {
        self.dual
    }

    /// `c β` for a raw row vector.
    pub fn left_apply(&self, c: &[f64]) -> Vec<f64> {
        let f = self.profile.values();
        if self.dual {
            // (c β*_f)_y = (1 − f_y) c_y + f_y (cα)_y
            let ca = self.kernel.left_apply(c);
            c.iter().zip(&ca).zip(f).map(|((&cy, &ay), &fy)| (1.0 - fy) * cy + fy * ay).collect()
        } else {
            left_apply_beta(&self.kernel, f, c)
        }
    }

    /// `β v` for a raw column vector.
    pub fn right_apply(&self, v: &[f64]) -> Vec<f64> {
        let f = self.profile.values();
        if self.dual {
            // β*_f v = (1 − f) v + α (f v)
            let fv: Vec<f64> = v.iter().zip(f).map(|(a, b)| a * b).collect();
            let afv = self.kernel.apply(&fv);
            v.iter().zip(f).zip(&afv).map(|((&vx, &fx), &a)| (1.0 - fx) * vx + a).collect()
        } else {
            // β_f v = (1 − f) v + f (α v)
            let av = self.kernel.apply(v);
            v.iter().zip(f).zip(&av).map(|((&vx, &fx), &a)| (1.0 - fx) * vx + fx * a).collect()
        }
    }
}

/// `c β_f` touching only the rows in the support of `f`.
pub(crate) fn left_apply_beta(kernel: &Kernel, f: &[f64], c: &[f64]) -> Vec<f64> {
    let mut out = c.to_vec();
    for (x, &fx) in f.iter().enumerate() {
        if fx != 0.0 {
            out[x] = (1.0 - fx) * c[x];
        }
    }
    for (x, &fx) in f.iter().enumerate() {
        let moved = fx * c[x];
        if moved != 0.0 {
            for &(y, a) in kernel.row(x) {
                out[y] += moved * a;
            }
        }
    }
    out
}

/// `c β` for a nonnegative dirt vector; the result is nonnegative.
pub fn apply_cleaning(c: &DirtVector, op: &CleaningOperator) -> Result<DirtVector> {
    c.space().ensure_same(op.kernel.space(), "apply_cleaning")?;
    let out = op.left_apply(c.values());
    Ok(DirtVector::from_raw(c.space(), out.into_iter().map(|v| v.max(0.0)).collect()))
}

/// `c β` for a signed vector (used for deviations).
pub fn apply_cleaning_signed(c: &SignedVector, op: &CleaningOperator) -> Result<SignedVector> {
    c.space().ensure_same(op.kernel.space(), "apply_cleaning_signed")?;
    SignedVector::new(c.space(), op.left_apply(c.values()))
}

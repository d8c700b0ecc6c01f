//! Dirt vectors, signed vectors, weight vectors and cleaning profiles.
//!
//! All four types store their values densely (one `f64` per site) and are
//! serialized sparsely as `{site: value}` maps.  Each constructor enforces
//! the sign or range invariant of its type.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel_core::space::{SiteSet, SiteSpace};

macro_rules! dense_vector_common {
    ($ty:ident) => {
        impl $ty {
            /// The ambient space.
            pub fn space(&self) -> &SiteSpace {
                &self.space
            }

            /// Dense values, indexed by site position.
            pub fn values(&self) -> &[f64] {
                &self.values
            }

            /// Value at dense position `i`.
            #[inline]
            pub fn get(&self, i: usize) -> f64 {
                self.values[i]
            }

            /// Number of sites.
            pub fn len(&self) -> usize {
                self.values.len()
            }

            /// `true` for a zero-length vector (never, since spaces are nonempty).
            pub fn is_empty(&self) -> bool {
                self.values.is_empty()
            }

            /// Builds the vector from a `{site: value}` map; absent sites
            /// take the default value of the type.
            pub fn from_map(space: &SiteSpace, map: &BTreeMap<String, f64>) -> Result<Self> {
                let mut values = vec![Self::DEFAULT; space.len()];
                for (k, &v) in map {
                    values[space.index_of(k)?] = v;
                }
                Self::new(space, values)
            }

            /// Sparse `{site: value}` map omitting entries equal to the default.
            pub fn to_map(&self) -> BTreeMap<String, f64> {
                self.values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != Self::DEFAULT || Self::DENSE)
                    .map(|(i, &v)| (self.space.name(i).to_string(), v))
                    .collect()
            }

            /// Consumes the vector and returns its dense values.
            pub fn into_values(self) -> Vec<f64> {
                self.values
            }
        }
    };
}

fn check_len(space: &SiteSpace, values: &[f64], what: &str) -> Result<()> {
    if values.len() != space.len() {
        return Err(Error::dimension(format!(
            "{what} has {} values for a space of {} sites",
            values.len(),
            space.len()
        )));
    }
    Ok(())
}

/// A nonnegative distribution of dirt, acting on operators from the left.
#[derive(Debug, Clone, PartialEq)]
pub struct DirtVector {
    space: SiteSpace,
    values: Vec<f64>,
}

impl DirtVector {
    const DEFAULT: f64 = 0.0;
    const DENSE: bool = false;

    /// Validates that all values are finite and nonnegative.
    pub fn new(space: &SiteSpace, values: Vec<f64>) -> Result<Self> {
        check_len(space, &values, "dirt vector")?;
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::contract(format!(
                "dirt at site `{}` is {v}, expected a finite nonnegative value",
                space.name(i)
            )));
        }
        Ok(Self { space: space.clone(), values })
    }

    /// The zero vector.
    pub fn zeros(space: &SiteSpace) -> Self {
        Self { space: space.clone(), values: vec![0.0; space.len()] }
    }

    /// Unit mass at site `i`.
    pub fn delta(space: &SiteSpace, i: usize) -> Self {
        let mut v = Self::zeros(space);
        v.values[i] = 1.0;
        v
    }

    /// Signed copy.
    pub fn to_signed(&self) -> SignedVector {
        SignedVector { space: self.space.clone(), values: self.values.clone() }
    }

    /// Zeroes the entries outside `set` (right multiplication by `I_set`).
    pub fn restrict(&self, set: &SiteSet) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| if set.contains(i) { v } else { 0.0 })
            .collect();
        Self { space: self.space.clone(), values }
    }

    pub(crate) fn from_raw(space: &SiteSpace, values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| *v >= 0.0));
        Self { space: space.clone(), values }
    }
}
dense_vector_common!(DirtVector);

/// A real vector with no sign constraint (used for deviations).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedVector {
    space: SiteSpace,
    values: Vec<f64>,
}

impl SignedVector {
    const DEFAULT: f64 = 0.0;
    const DENSE: bool = false;

    /// Validates only finiteness.
    pub fn new(space: &SiteSpace, values: Vec<f64>) -> Result<Self> {
        check_len(space, &values, "signed vector")?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("signed vector has a non-finite entry"));
        }
        Ok(Self { space: space.clone(), values })
    }

    /// The zero vector.
    pub fn zeros(space: &SiteSpace) -> Self {
        Self { space: space.clone(), values: vec![0.0; space.len()] }
    }
}
dense_vector_common!(SignedVector);

impl From<&DirtVector> for SignedVector {
    fn from(c: &DirtVector) -> Self {
        c.to_signed()
    }
}

/// A strictly positive weight vector `w`.
///
/// The type does not require `αw ≤ w`; that is checked separately by
/// [`is_subinvariant`](crate::kernel_core::is_subinvariant).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    space: SiteSpace,
    values: Vec<f64>,
}

impl WeightVector {
    const DEFAULT: f64 = 1.0;
    const DENSE: bool = true;

    /// Validates that all values are finite and strictly positive.
    pub fn new(space: &SiteSpace, values: Vec<f64>) -> Result<Self> {
        check_len(space, &values, "weight vector")?;
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::contract(format!(
                "weight at site `{}` is {v}, expected a finite positive value",
                space.name(i)
            )));
        }
        Ok(Self { space: space.clone(), values })
    }

    /// The constant weight `w ≡ 1`.
    pub fn ones(space: &SiteSpace) -> Self {
        Self { space: space.clone(), values: vec![1.0; space.len()] }
    }
}
dense_vector_common!(WeightVector);

/// A cleaning profile `h: X → [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    space: SiteSpace,
    values: Vec<f64>,
}

impl Profile {
    const DEFAULT: f64 = 0.0;
    const DENSE: bool = false;

    /// Validates that all values lie in `[0, 1]`.
    pub fn new(space: &SiteSpace, values: Vec<f64>) -> Result<Self> {
        check_len(space, &values, "profile")?;
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && **v <= 1.0)) {
            return Err(Error::contract(format!(
                "profile value at site `{}` is {v}, expected a value in [0, 1]",
                space.name(i)
            )));
        }
        Ok(Self { space: space.clone(), values })
    }

    /// The zero profile (`β_0 = I`).
    pub fn zeros(space: &SiteSpace) -> Self {
        Self { space: space.clone(), values: vec![0.0; space.len()] }
    }

    /// Indicator `χ_set`.
    pub fn indicator(set: &SiteSet) -> Self {
        Self::scaled_indicator(set, 1.0)
    }

    /// `ε χ_set` for `ε ∈ [0, 1]`.
    ///
    /// # Panics
    /// Panics if `eps` is outside `[0, 1]`.
    pub fn scaled_indicator(set: &SiteSet, eps: f64) -> Self {
        assert!((0.0..=1.0).contains(&eps), "scale must lie in [0, 1]");
        let values = set.mask().iter().map(|&b| if b { eps } else { 0.0 }).collect();
        Self { space: set.space().clone(), values }
    }

    /// `ε δ_i`: clean the single site `i` with strength `ε`.
    ///
    /// # Panics
    /// Panics if `eps` is outside `[0, 1]`.
    pub fn point(space: &SiteSpace, i: usize, eps: f64) -> Self {
        assert!((0.0..=1.0).contains(&eps), "scale must lie in [0, 1]");
        let mut values = vec![0.0; space.len()];
        values[i] = eps;
        Self { space: space.clone(), values }
    }

    /// Sites where the profile is positive.
    pub fn support(&self) -> SiteSet {
        SiteSet::from_mask(&self.space, self.values.iter().map(|&v| v > 0.0).collect())
            .expect("mask length matches")
    }

    /// `true` when `supp(h) ⊆ set`.
    pub fn is_supported_in(&self, set: &SiteSet) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| v == 0.0 || set.contains(i))
    }

    /// `true` when `self ≤ other` pointwise.
    pub fn le(&self, other: &Profile) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    /// `1 − Π_i (1 − f_i)`: the profile of the collapsed product
    /// `β_{f_1} ⋯ β_{f_n}`.  An empty list gives the zero profile.
    pub fn collapse<'a, I: IntoIterator<Item = &'a Profile>>(space: &SiteSpace, profiles: I) -> Self {
        let mut keep = vec![1.0; space.len()];
        for p in profiles {
            for (k, v) in keep.iter_mut().zip(&p.values) {
                *k *= 1.0 - v;
            }
        }
        let values = keep.into_iter().map(|k| (1.0 - k).clamp(0.0, 1.0)).collect();
        Self { space: space.clone(), values }
    }

    /// Pointwise sum, returned as raw values (it may exceed 1).
    pub fn accumulate(&self, acc: &mut [f64]) {
        for (a, v) in acc.iter_mut().zip(&self.values) {
            *a += v;
        }
    }
}
dense_vector_common!(Profile);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_enforced() {
        let s = SiteSpace::indexed(2);
        assert!(DirtVector::new(&s, vec![1.0, -1.0]).is_err());
        assert!(WeightVector::new(&s, vec![1.0, 0.0]).is_err());
        assert!(Profile::new(&s, vec![0.5, 1.5]).is_err());
        assert!(Profile::new(&s, vec![0.5, f64::NAN]).is_err());
        assert!(DirtVector::new(&s, vec![1.0]).is_err());
    }

    #[test]
    fn sparse_maps() {
        let s = SiteSpace::new(["a", "b", "c"]).unwrap();
        let c = DirtVector::new(&s, vec![0.0, 2.0, 0.0]).unwrap();
        let m = c.to_map();
        assert_eq!(m.len(), 1);
        assert_eq!(DirtVector::from_map(&s, &m).unwrap(), c);
        let w = WeightVector::ones(&s);
        assert_eq!(w.to_map().len(), 3);
    }

    #[test]
    fn collapse_of_profiles() {
        let s = SiteSpace::indexed(2);
        let a = Profile::new(&s, vec![0.5, 0.0]).unwrap();
        let b = Profile::new(&s, vec![0.5, 0.25]).unwrap();
        let c = Profile::collapse(&s, [&a, &b]);
        assert_eq!(c.values(), &[0.75, 0.25]);
    }
}

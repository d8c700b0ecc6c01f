//! Site spaces and subsets of sites.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug)]
struct SpaceInner {
    sites: Vec<String>,
    index: HashMap<String, usize>,
}

/// An ordered, finite set of opaque site identifiers.
///
/// Cloning is cheap (the identifiers are shared).  Two spaces are equal when
/// they list the same identifiers in the same order.
#[derive(Clone)]
pub struct SiteSpace {
    inner: Arc<SpaceInner>,
}

impl SiteSpace {
    /// Builds a space from a list of identifiers, which must be nonempty and
    /// pairwise distinct.
    pub fn new<I, S>(sites: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sites: Vec<String> = sites.into_iter().map(Into::into).collect();
        if sites.is_empty() {
            return Err(Error::contract("a site space must contain at least one site"));
        }
        let mut index = HashMap::with_capacity(sites.len());
        for (i, s) in sites.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::contract(format!("duplicate site identifier `{s}`")));
            }
        }
        Ok(Self { inner: Arc::new(SpaceInner { sites, index }) })
    }

    /// The space `{"0", "1", ..., "n-1"}`.
    ///
    /// # Panics
    /// Panics if `n == 0`.
    pub fn indexed(n: usize) -> Self {
        assert!(n > 0, "a site space must contain at least one site");
        Self::new((0..n).map(|i| i.to_string())).expect("indexed names are distinct")
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.inner.sites.len()
    }

    /// Always `false`: site spaces are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Identifiers in order.
    pub fn sites(&self) -> &[String] {
        &self.inner.sites
    }

    /// Identifier of the site at dense position `i`.
    pub fn name(&self, i: usize) -> &str {
        &self.inner.sites[i]
    }

    /// Dense position of a site identifier.
    pub fn index_of(&self, site: &str) -> Result<usize> {
        self.inner
            .index
            .get(site)
            .copied()
            .ok_or_else(|| Error::UnknownSite(site.to_string()))
    }

    /// Fails with a dimension error unless `other` equals `self`.
    pub fn ensure_same(&self, other: &SiteSpace, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::dimension(format!(
                "{what}: spaces of sizes {} and {} differ",
                self.len(),
                other.len()
            )))
        }
    }
}

impl PartialEq for SiteSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.sites == other.inner.sites
    }
}

impl Eq for SiteSpace {}

impl fmt::Debug for SiteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SiteSpace").field(&self.inner.sites).finish()
    }
}

/// A subset of a [`SiteSpace`] with bitset semantics.
#[derive(Clone, PartialEq, Eq)]
pub struct SiteSet {
    space: SiteSpace,
    members: Vec<bool>,
}

impl SiteSet {
    /// The empty subset.
    pub fn empty(space: &SiteSpace) -> Self {
        Self { space: space.clone(), members: vec![false; space.len()] }
    }

    /// The whole space.
    pub fn full(space: &SiteSpace) -> Self {
        Self { space: space.clone(), members: vec![true; space.len()] }
    }

    /// Subset given by dense positions.
    pub fn from_indices<I: IntoIterator<Item = usize>>(space: &SiteSpace, idx: I) -> Result<Self> {
        let mut set = Self::empty(space);
        for i in idx {
            if i >= space.len() {
                return Err(Error::dimension(format!(
                    "site index {i} out of range for a space of {} sites",
                    space.len()
                )));
            }
            set.members[i] = true;
        }
        Ok(set)
    }

    /// Subset given by site identifiers.
    pub fn from_names<I, S>(space: &SiteSpace, names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let idx = names
            .into_iter()
            .map(|s| space.index_of(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(space, idx)
    }

    /// Subset given by a membership mask.
    pub fn from_mask(space: &SiteSpace, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != space.len() {
            return Err(Error::dimension("membership mask length differs from space size"));
        }
        Ok(Self { space: space.clone(), members: mask })
    }

    /// The ambient space.
    pub fn space(&self) -> &SiteSpace {
        &self.space
    }

    /// Membership test by dense position.
    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }

    /// Membership mask.
    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    /// `true` when there are no members.
    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    /// `true` when every site is a member.
    pub fn is_full(&self) -> bool {
        self.members.iter().all(|&b| b)
    }

    /// Dense positions of the members, increasing.
    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Iterator over member positions.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    /// The complementary subset.
    pub fn complement(&self) -> Self {
        Self { space: self.space.clone(), members: self.members.iter().map(|b| !b).collect() }
    }

    /// `true` when `self ⊆ other`.
    pub fn is_subset(&self, other: &SiteSet) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }

    /// Member identifiers in order.
    pub fn names(&self) -> Vec<String> {
        self.iter().map(|i| self.space.name(i).to_string()).collect()
    }
}

impl fmt::Debug for SiteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|i| self.space.name(i))).finish()
    }
}

//! Markers: nonempty finite site sequences recording a particle's path.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::kernel_core::SiteSpace;

/// A marker `η = (x_0, …, x_k)` of level `k`, stored as dense site indices.
///
/// Markers are ordered first by level, then lexicographically, which is
/// the canonical enumeration order used for witnesses.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Marker(Vec<usize>);

impl Marker {
    /// Builds a marker from site indices; fails on an empty path.
    pub fn new(path: Vec<usize>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::contract("a marker must contain at least one site"));
        }
        Ok(Self(path))
    }

    /// The level-0 marker `(x)`.
    pub fn single(x: usize) -> Self {
        Self(vec![x])
    }

    /// Builds a marker from site names.
    pub fn from_names<S: AsRef<str>>(space: &SiteSpace, names: &[S]) -> Result<Self> {
        let path = names.iter().map(|n| space.index_of(n.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::new(path)
    }

    /// Site names along the path.
    pub fn names(&self, space: &SiteSpace) -> Vec<String> {
        self.0.iter().map(|&i| space.name(i).to_string()).collect()
    }

    /// Compact rendering: names concatenated when all are single
    /// characters, otherwise joined with `-`.
    pub fn render(&self, space: &SiteSpace) -> String {
        let names = self.names(space);
        if names.iter().all(|n| n.chars().count() == 1) {
            names.concat()
        } else {
            names.join("-")
        }
    }

    /// The site indices.
    pub fn path(&self) -> &[usize] {
        &self.0
    }

    /// Level `k` = length − 1.
    pub fn level(&self) -> usize {
        self.0.len() - 1
    }

    /// First site `x_0`.
    pub fn first(&self) -> usize {
        self.0[0]
    }

    /// Last site `x_k`.
    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    /// The prefix `η_0^i = (x_0, …, x_i)`.
    pub fn prefix(&self, i: usize) -> Marker {
        Marker(self.0[..=i].to_vec())
    }

    /// The suffix `η_i^k = (x_i, …, x_k)`.
    pub fn suffix(&self, i: usize) -> Marker {
        Marker(self.0[i..].to_vec())
    }

    /// `η^-`: the marker with its last entry removed (`None` at level 0).
    pub fn parent(&self) -> Option<Marker> {
        (self.0.len() > 1).then(|| Marker(self.0[..self.0.len() - 1].to_vec()))
    }

    /// `η` extended by one site.
    pub fn child(&self, y: usize) -> Marker {
        let mut p = self.0.clone();
        p.push(y);
        Marker(p)
    }

    /// The splice `η_1 * η_2` (requires `last(η_1) = first(η_2)`).
    pub fn splice(&self, other: &Marker) -> Option<Marker> {
        if self.last() != other.first() {
            return None;
        }
        let mut p = self.0.clone();
        p.extend_from_slice(&other.0[1..]);
        Some(Marker(p))
    }

    /// `true` when `self ≼ other` (ancestor or equal).
    pub fn is_prefix_of(&self, other: &Marker) -> bool {
        other.0.starts_with(&self.0)
    }

    /// All nonempty subsequences (as index subsets of positions), excluding
    /// the marker itself, in canonical marker order without duplicates.
    pub fn proper_subsequences(&self) -> Vec<Marker> {
        let k = self.0.len();
        let mut out: Vec<Marker> = (1u64..(1u64 << k) - 1)
            .map(|mask| Marker((0..k).filter(|&i| mask >> i & 1 == 1).map(|i| self.0[i]).collect()))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl Ord for Marker {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Marker {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Marker{:?}", self.0)
    }
}

/// Calls `visit` on every marker of level `≤ max_level` over `n` sites in
/// canonical order (by level, then lexicographically), stopping early
/// (with `Ok(false)`) if `visit` returns `false`.  Fails if more than
/// `node_cap` markers would be visited.
pub(crate) fn for_each_marker(
    n: usize,
    max_level: usize,
    node_cap: usize,
    mut visit: impl FnMut(&Marker) -> bool,
) -> Result<bool> {
    let count = marker_count(n, max_level);
    if count > node_cap as u128 {
        return Err(Error::Inconclusive(format!(
            "{count} markers up to level {max_level} exceed the enumeration cap {node_cap}"
        )));
    }
    for level in 0..=max_level {
        let mut path = vec![0usize; level + 1];
        loop {
            let m = Marker(path.clone());
            if !visit(&m) {
                return Ok(false);
            }
            // Odometer increment, last position fastest.
            let mut i = level + 1;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                path[i] += 1;
                if path[i] < n {
                    break;
                }
                path[i] = 0;
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
    Ok(true)
}

/// All markers of level `≤ max_level`, in canonical order.
pub(crate) fn all_markers(n: usize, max_level: usize, node_cap: usize) -> Result<Vec<Marker>> {
    let mut out = Vec::new();
    for_each_marker(n, max_level, node_cap, |m| {
        out.push(m.clone());
        true
    })?;
    Ok(out)
}

/// Number of markers of level `≤ max_level` over `n` sites.
pub(crate) fn marker_count(n: usize, max_level: usize) -> u128 {
    let mut total: u128 = 0;
    let mut layer: u128 = n as u128;
    for _ in 0..=max_level {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(n as u128);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_level_then_lex() {
        let a = Marker::new(vec![1]).unwrap();
        let b = Marker::new(vec![0, 0]).unwrap();
        assert!(a < b);
        assert!(Marker::new(vec![]).is_err());
    }

    #[test]
    fn splice_and_prefixes() {
        let a = Marker::new(vec![0, 1]).unwrap();
        let b = Marker::new(vec![1, 0]).unwrap();
        assert_eq!(a.splice(&b).unwrap().path(), &[0, 1, 0]);
        assert!(b.splice(&b).is_none());
        assert!(a.prefix(0).is_prefix_of(&a));
        assert_eq!(a.parent().unwrap(), Marker::single(0));
    }

    #[test]
    fn subsequences_of_xyx() {
        let m = Marker::new(vec![0, 1, 0]).unwrap();
        let subs: Vec<Vec<usize>> = m.proper_subsequences().iter().map(|s| s.path().to_vec()).collect();
        assert_eq!(subs, vec![vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn enumeration_is_canonical() {
        let all = all_markers(3, 2, 100).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(marker_count(2, 2), 14);
        assert_eq!(all_markers(2, 2, 100).unwrap().len(), 14);
        assert!(all_markers(2, 30, 100).is_err());
    }
}

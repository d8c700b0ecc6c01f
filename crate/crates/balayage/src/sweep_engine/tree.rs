//! The branching tree `X = {0} ∪ {(k, ℓ) : 1 ≤ k ≤ ℓ}` used by the
//! adversarial and good sweeping orders, and a sparse sweeper that tracks
//! only charged sites (the tree grows quadratically in its depth, while the
//! dirt stays on a thin front).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A site of the branching tree: the root `0` or `(k, ℓ)` with `1 ≤ k ≤ ℓ`
/// (height `k` on branch `ℓ`; `(ℓ, ℓ)` is the summit of branch `ℓ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeSite {
    /// The root.
    Root,
    /// Height `k` on branch `ℓ`.
    Node(usize, usize),
}

impl TreeSite {
    /// Dense index: `0` for the root, `1 + ℓ(ℓ−1)/2 + (k−1)` otherwise.
    pub fn index(self) -> usize {
        match self {
            TreeSite::Root => 0,
            TreeSite::Node(k, l) => 1 + l * (l - 1) / 2 + (k - 1),
        }
    }

    /// Inverse of [`TreeSite::index`].
    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            return TreeSite::Root;
        }
        let j = i - 1;
        // Largest ℓ with ℓ(ℓ−1)/2 ≤ j.
        let mut l = (((8 * j + 1) as f64).sqrt() as usize).div_ceil(2);
        while l * (l - 1) / 2 > j {
            l -= 1;
        }
        while (l + 1) * l / 2 <= j {
            l += 1;
        }
        TreeSite::Node(j - l * (l - 1) / 2 + 1, l)
    }

    /// `true` for a summit `(ℓ, ℓ)`.
    pub fn is_summit(self) -> bool {
        matches!(self, TreeSite::Node(k, l) if k == l)
    }

    /// Number of sites of the tree truncated to branches `1..=depth`.
    pub fn count(depth: usize) -> usize {
        1 + depth * (depth + 1) / 2
    }
}

impl fmt::Display for TreeSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeSite::Root => write!(f, "0"),
            TreeSite::Node(k, l) => write!(f, "({k},{l})"),
        }
    }
}

/// `A_L`: the non-summit sites of branches `2..=L`, branch by branch,
/// bottom to top: `(1,2), (1,3), (2,3), …, (1,L), …, (L−1,L)`.
pub fn non_summit_sweep(l: usize) -> Vec<TreeSite> {
    (2..=l).flat_map(|b| (1..b).map(move |k| TreeSite::Node(k, b))).collect()
}

/// `B_L`: the summits `(1,1), …, (L,L)`.
pub fn summit_sweep(l: usize) -> Vec<TreeSite> {
    (1..=l).map(|b| TreeSite::Node(b, b)).collect()
}

/// Step counts `(end of A_{L_r}, end of B_r)` of one adversarial stage.
pub type StageBounds = (usize, usize);

/// The adversarial order `0, A_{L_1}, B_1, A_{L_2}, B_2, …` with stage
/// ends after each `B_r`.  Returns the order and the stage boundaries
/// (`(end of A_{L_r}, end of B_r)`, as step counts).
pub fn adversarial_order(stage_depths: &[usize]) -> Result<(Vec<TreeSite>, Vec<StageBounds>)> {
    if stage_depths.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::contract("stage depths L_1 < L_2 < … must increase"));
    }
    let mut order = vec![TreeSite::Root];
    let mut ends = Vec::new();
    for (r, &l) in stage_depths.iter().enumerate() {
        order.extend(non_summit_sweep(l));
        let a_end = order.len();
        order.extend(summit_sweep(r + 1));
        ends.push((a_end, order.len()));
    }
    Ok((order, ends))
}

/// The good order `0, (1,1), (1,2), (2,2), (1,3), (2,3), (3,3), …` through
/// branch `depth`, with the step count at which each summit `(ℓ,ℓ)` is swept.
pub fn branchwise_order(depth: usize) -> (Vec<TreeSite>, Vec<usize>) {
    let mut order = vec![TreeSite::Root];
    let mut summits = Vec::with_capacity(depth);
    for l in 1..=depth {
        order.extend((1..=l).map(|k| TreeSite::Node(k, l)));
        summits.push(order.len());
    }
    (order, summits)
}

/// Dirt stored only on charged sites, swept with exact scalar arithmetic.
#[derive(Debug, Clone)]
pub struct SparseDirt<S: Scalar> {
    mass: HashMap<usize, S>,
    peak_charged: usize,
}

impl<S: Scalar> SparseDirt<S> {
    /// Dirt from `(site, mass)` pairs.
    pub fn new<I: IntoIterator<Item = (usize, S)>>(entries: I) -> Self {
        let mass: HashMap<usize, S> = entries.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        let peak_charged = mass.len();
        Self { mass, peak_charged }
    }

    /// Mass at `x`.
    pub fn get(&self, x: usize) -> S {
        self.mass.get(&x).cloned().unwrap_or_else(S::zero)
    }

    /// Number of charged sites.
    pub fn charged(&self) -> usize {
        self.mass.len()
    }

    /// Largest number of simultaneously charged sites seen so far.
    pub fn peak_charged(&self) -> usize {
        self.peak_charged
    }

    /// `Σ_x mass_x` over sites accepted by `keep`.
    pub fn total_where(&self, keep: impl Fn(usize) -> bool) -> S {
        let mut keys: Vec<&usize> = self.mass.keys().filter(|&&x| keep(x)).collect();
        keys.sort_unstable();
        keys.into_iter().fold(S::zero(), |acc, x| acc.add(&self.mass[x]))
    }

    /// `c ← c β_{ε δ_x}`, where `row(x)` lists the kernel row of `x`.
    pub fn sweep(&mut self, x: usize, eps: &S, row: impl Fn(usize) -> Vec<(usize, S)>) {
        let Some(here) = self.mass.get(&x).cloned() else { return };
        let moved = here.mul(eps);
        if moved.is_zero() {
            return;
        }
        let left = here.sub(&moved);
        if left.is_zero() {
            self.mass.remove(&x);
        } else {
            self.mass.insert(x, left);
        }
        for (y, a) in row(x) {
            let add = moved.mul(&a);
            if add.is_zero() {
                continue;
            }
            let slot = self.mass.entry(y).or_insert_with(S::zero);
            *slot = slot.add(&add);
            if slot.is_zero() {
                self.mass.remove(&y);
            }
        }
        self.peak_charged = self.peak_charged.max(self.mass.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dyadic;

    #[test]
    fn layout_round_trips() {
        for i in 0..5000 {
            assert_eq!(TreeSite::from_index(i).index(), i);
        }
        assert_eq!(TreeSite::Node(1, 1).index(), 1);
        assert_eq!(TreeSite::Node(2, 3).index(), 5);
        assert_eq!(TreeSite::count(3), 7);
    }

    #[test]
    fn orders() {
        let (o, ends) = adversarial_order(&[3, 4]).unwrap();
        let names: Vec<String> = o.iter().map(ToString::to_string).collect();
        assert_eq!(
            names[..6],
            ["0", "(1,2)", "(1,3)", "(2,3)", "(1,1)", "(1,2)"].map(String::from)
        );
        assert_eq!(ends, vec![(4, 5), (11, 13)]);
        let (g, summits) = branchwise_order(3);
        assert_eq!(g.len(), 7);
        assert_eq!(summits, vec![2, 4, 7]);
    }

    #[test]
    fn sparse_sweep_moves_mass() {
        let mut d = SparseDirt::new([(0usize, Dyadic::one())]);
        let half = Dyadic::pow2_neg(1);
        d.sweep(0, &half, |_| vec![(1, Dyadic::from_int(2)), (2, Dyadic::one())]);
        assert_eq!(d.get(0), half);
        assert_eq!(d.get(1), Dyadic::one());
        assert_eq!(d.total_where(|_| true), Dyadic::from_int(2));
        assert_eq!(d.peak_charged(), 3);
    }
}

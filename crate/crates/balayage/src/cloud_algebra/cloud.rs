//! Clouds: real-valued functions on markers, with convolution,
//! cumulative distributions, the cloud norm and the special clouds
//! `π_Λ`, `𝟏` and `𝟏_Λ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::marker::{all_markers, Marker};
use crate::error::{Error, Result};
use crate::kernel_core::{Profile, SiteSet, SiteSpace};
use crate::scalar::Scalar;

/// Largest number of markers any enumeration will visit.
pub const MARKER_NODE_CAP: usize = 4_000_000;

#[derive(Clone, Debug)]
enum Repr<S: Scalar> {
    Finite(BTreeMap<Marker, S>),
    Balayage(SiteSet),
    One,
    OneOn(SiteSet),
    Cumulative(Box<Cloud<S>>),
    Product(Box<Cloud<S>>, Box<Cloud<S>>),
    Combination(Vec<(S, Cloud<S>)>),
}

/// How a cloud is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CloudKind {
    /// Finitely many stored markers.
    Finite,
    /// The balayage cloud `π_Λ`: 1 on `∂Λ`, 0 elsewhere.
    Balayage,
    /// The constant cloud `𝟏`.
    One,
    /// `𝟏_Λ`: 1 on markers with all entries in `Λ`.
    OneOn,
    /// The cumulative distribution `ν̃` of another cloud.
    Cumulative,
    /// A convolution evaluated pointwise on demand.
    Product,
    /// A finite linear combination evaluated pointwise on demand.
    Combination,
}

/// A cloud `ν` over a site space.
///
/// Finite clouds store their nonzero weights; the specials and lazily
/// combined clouds answer pointwise value queries exactly.  Convolving two
/// finite clouds materializes the result; any other convolution is kept
/// as a pointwise-evaluated product.
#[derive(Clone, Debug)]
pub struct Cloud<S: Scalar = f64> {
    space: SiteSpace,
    level_bound: Option<usize>,
    repr: Repr<S>,
}

/// JSON literal of a finite cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudLiteral {
    /// Stored markers with their weights.
    pub markers: Vec<MarkerWeight>,
    /// Declared level bound `N` (weights vanish above it).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_bound: Option<usize>,
}

/// One entry of a [`CloudLiteral`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerWeight {
    /// Site names along the marker.
    pub path: Vec<String>,
    /// Weight.
    pub w: f64,
}

impl<S: Scalar> Cloud<S> {
    /// A finite cloud; duplicate markers are summed and zeros dropped.
    pub fn finite<I: IntoIterator<Item = (Marker, S)>>(space: &SiteSpace, entries: I) -> Result<Self> {
        let mut map: BTreeMap<Marker, S> = BTreeMap::new();
        for (m, w) in entries {
            if let Some(&bad) = m.path().iter().find(|&&x| x >= space.len()) {
                return Err(Error::UnknownSite(format!("site index {bad} in marker {m:?}")));
            }
            let slot = map.entry(m).or_insert_with(S::zero);
            *slot = slot.add(&w);
        }
        map.retain(|_, w| !w.is_zero());
        Ok(Self::from_map(space, map))
    }

    fn from_map(space: &SiteSpace, map: BTreeMap<Marker, S>) -> Self {
        let bound = map.keys().map(Marker::level).max().unwrap_or(0);
        Self { space: space.clone(), level_bound: Some(bound), repr: Repr::Finite(map) }
    }

    /// The zero cloud.
    pub fn zero(space: &SiteSpace) -> Self {
        Self::from_map(space, BTreeMap::new())
    }

    /// `ρ^k`: weight 1 on every marker of level `k`.
    pub fn rho(space: &SiteSpace, k: usize) -> Result<Self> {
        let n = space.len();
        let markers = all_markers(n, k, MARKER_NODE_CAP)?;
        let mut c = Self::finite(space, markers.into_iter().filter(|m| m.level() == k).map(|m| (m, S::one())))?;
        c.level_bound = Some(k);
        Ok(c)
    }

    /// The level-0 cloud `I_f`.
    pub fn indicator(space: &SiteSpace, f: &[S]) -> Result<Self> {
        check_len(space, f.len())?;
        Self::finite(space, f.iter().enumerate().map(|(x, v)| (Marker::single(x), v.clone())))
    }

    /// `I_Λ`.
    pub fn indicator_set(set: &SiteSet) -> Self {
        let space = set.space();
        Self::finite(space, set.iter().map(|x| (Marker::single(x), S::one()))).expect("valid sites")
    }

    /// `β_f = I_{1−f} + I_f * ρ^1`.
    pub fn beta(space: &SiteSpace, f: &[S]) -> Result<Self> {
        check_len(space, f.len())?;
        let n = space.len();
        let mut entries = Vec::with_capacity(n * (n + 1));
        for (x, fx) in f.iter().enumerate() {
            entries.push((Marker::single(x), S::one().sub(fx)));
            for y in 0..n {
                entries.push((Marker::single(x).child(y), fx.clone()));
            }
        }
        let mut c = Self::finite(space, entries)?;
        c.level_bound = Some(1);
        Ok(c)
    }

    /// `β_h` for a profile, converting its values exactly.
    pub fn beta_profile(h: &Profile) -> Result<Self> {
        let f = profile_scalars::<S>(h)?;
        Self::beta(h.space(), &f)
    }

    /// `I_h` for a profile.
    pub fn indicator_profile(h: &Profile) -> Result<Self> {
        let f = profile_scalars::<S>(h)?;
        Self::indicator(h.space(), &f)
    }

    /// The balayage cloud `π_Λ` (1 on `∂Λ`).
    pub fn balayage(lambda: &SiteSet) -> Self {
        Self { space: lambda.space().clone(), level_bound: None, repr: Repr::Balayage(lambda.clone()) }
    }

    /// The constant cloud `𝟏`.
    pub fn one(space: &SiteSpace) -> Self {
        Self { space: space.clone(), level_bound: None, repr: Repr::One }
    }

    /// `𝟏_Λ`.
    pub fn one_on(lambda: &SiteSet) -> Self {
        Self { space: lambda.space().clone(), level_bound: None, repr: Repr::OneOn(lambda.clone()) }
    }

    /// The cumulative distribution `ν̃ = ν * 𝟏` as a cloud.
    pub fn cumulative_cloud(&self) -> Self {
        Self { space: self.space.clone(), level_bound: None, repr: Repr::Cumulative(Box::new(self.clone())) }
    }

    /// Builds a finite cloud from its JSON literal.
    pub fn from_literal(space: &SiteSpace, lit: &CloudLiteral) -> Result<Self> {
        let entries = lit
            .markers
            .iter()
            .map(|mw| Ok((Marker::from_names(space, &mw.path)?, S::from_f64(mw.w)?)))
            .collect::<Result<Vec<_>>>()?;
        let c = Self::finite(space, entries)?;
        match lit.level_bound {
            Some(n) => c.with_level_bound(n),
            None => Ok(c),
        }
    }

    /// JSON literal of a finite cloud.
    pub fn to_literal(&self) -> Result<CloudLiteral> {
        let map = self.entries().ok_or_else(|| {
            Error::NotImplemented(format!("{:?} cloud has no finite literal", self.kind()))
        })?;
        Ok(CloudLiteral {
            markers: map
                .iter()
                .map(|(m, w)| MarkerWeight { path: m.names(&self.space), w: w.to_f64() })
                .collect(),
            level_bound: self.level_bound,
        })
    }

    /// Declares a level bound `N` (no stored marker may exceed it).
    pub fn with_level_bound(mut self, bound: usize) -> Result<Self> {
        if let Some(map) = self.entries() {
            if let Some(m) = map.keys().rev().find(|m| m.level() > bound) {
                return Err(Error::contract(format!("marker {m:?} lies above the level bound {bound}")));
            }
        } else {
            return Err(Error::contract("only finite clouds accept a level bound"));
        }
        self.level_bound = Some(bound);
        Ok(self)
    }

    /// Converts the weights to another scalar type (finite clouds only).
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> Result<T> + Copy) -> Result<Cloud<T>> {
        let repr = match &self.repr {
            Repr::Finite(map) => {
                let mut out = BTreeMap::new();
                for (m, w) in map {
                    let v = f(w)?;
                    if !v.is_zero() {
                        out.insert(m.clone(), v);
                    }
                }
                Repr::Finite(out)
            }
            Repr::Balayage(s) => Repr::Balayage(s.clone()),
            Repr::One => Repr::One,
            Repr::OneOn(s) => Repr::OneOn(s.clone()),
            Repr::Cumulative(c) => Repr::Cumulative(Box::new(c.map_scalar(f)?)),
            Repr::Product(a, b) => Repr::Product(Box::new(a.map_scalar(f)?), Box::new(b.map_scalar(f)?)),
            Repr::Combination(terms) => Repr::Combination(
                terms.iter().map(|(s, c)| Ok((f(s)?, c.map_scalar(f)?))).collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(Cloud { space: self.space.clone(), level_bound: self.level_bound, repr })
    }

    /// The ambient space.
    pub fn space(&self) -> &SiteSpace {
        &self.space
    }

    /// Representation kind.
    pub fn kind(&self) -> CloudKind {
        match &self.repr {
            Repr::Finite(_) => CloudKind::Finite,
            Repr::Balayage(_) => CloudKind::Balayage,
            Repr::One => CloudKind::One,
            Repr::OneOn(_) => CloudKind::OneOn,
            Repr::Cumulative(_) => CloudKind::Cumulative,
            Repr::Product(..) => CloudKind::Product,
            Repr::Combination(_) => CloudKind::Combination,
        }
    }

    /// `true` for finitely stored clouds.
    pub fn is_finite(&self) -> bool {
        matches!(self.repr, Repr::Finite(_))
    }

    /// Stored weights of a finite cloud.
    pub fn entries(&self) -> Option<&BTreeMap<Marker, S>> {
        match &self.repr {
            Repr::Finite(m) => Some(m),
            _ => None,
        }
    }

    /// Level bound `N`, if the cloud vanishes above some level.
    pub fn level_bound(&self) -> Option<usize> {
        self.level_bound
    }

    /// The region of a `π_Λ` cloud.
    pub fn balayage_region(&self) -> Option<&SiteSet> {
        match &self.repr {
            Repr::Balayage(s) => Some(s),
            _ => None,
        }
    }

    /// `true` when every value is determined by finitely stored data
    /// together with `π_Λ` (whose cumulative stabilizes after leaving `Λ`).
    pub(crate) fn is_finite_or_balayage(&self) -> bool {
        matches!(self.repr, Repr::Finite(_) | Repr::Balayage(_))
    }

    /// `ν(η)`.
    pub fn value(&self, eta: &Marker) -> S {
        match &self.repr {
            Repr::Finite(map) => map.get(eta).cloned().unwrap_or_else(S::zero),
            Repr::Balayage(l) => {
                let p = eta.path();
                let inside = p[..p.len() - 1].iter().all(|&x| l.contains(x));
                if inside && !l.contains(eta.last()) {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Repr::One => S::one(),
            Repr::OneOn(l) => {
                if eta.path().iter().all(|&x| l.contains(x)) {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Repr::Cumulative(c) => c.cumulative(eta),
            Repr::Product(a, b) => {
                let mut acc = S::zero();
                for i in 0..=eta.level() {
                    let av = a.value(&eta.prefix(i));
                    if av.is_zero() {
                        continue;
                    }
                    let bv = b.value(&eta.suffix(i));
                    acc = acc.add(&av.mul(&bv));
                }
                acc
            }
            Repr::Combination(terms) => {
                terms.iter().fold(S::zero(), |acc, (s, c)| acc.add(&s.mul(&c.value(eta))))
            }
        }
    }

    /// `ν̃(η) = Σ_{σ≼η} ν(σ)`.
    pub fn cumulative(&self, eta: &Marker) -> S {
        match &self.repr {
            Repr::Balayage(l) => {
                if eta.path().iter().any(|&x| !l.contains(x)) {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Repr::One => (0..=eta.level()).fold(S::zero(), |a, _| a.add(&S::one())),
            Repr::OneOn(l) => {
                let run = eta.path().iter().take_while(|&&x| l.contains(x)).count();
                (0..run).fold(S::zero(), |a, _| a.add(&S::one()))
            }
            _ => (0..=eta.level()).fold(S::zero(), |acc, i| acc.add(&self.value(&eta.prefix(i)))),
        }
    }

    /// The dual-cloud value `ν̃(η) − ν̃(η^-)` (with `ν̃(η^-) = 0` at level 0).
    pub fn dual_at(&self, eta: &Marker) -> S {
        let here = self.cumulative(eta);
        match eta.parent() {
            Some(p) => here.sub(&self.cumulative(&p)),
            None => here,
        }
    }

    /// `ν_1 + ν_2`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.space.ensure_same(&other.space, "cloud sum")?;
        if let (Repr::Finite(a), Repr::Finite(b)) = (&self.repr, &other.repr) {
            let mut map = a.clone();
            for (m, w) in b {
                let slot = map.entry(m.clone()).or_insert_with(S::zero);
                *slot = slot.add(w);
            }
            map.retain(|_, w| !w.is_zero());
            let mut c = Self::from_map(&self.space, map);
            c.level_bound = max_bound(self.level_bound, other.level_bound);
            return Ok(c);
        }
        Ok(Self {
            space: self.space.clone(),
            level_bound: max_bound(self.level_bound, other.level_bound),
            repr: Repr::Combination(vec![(S::one(), self.clone()), (S::one(), other.clone())]),
        })
    }

    /// `s · ν`.
    pub fn scale(&self, s: &S) -> Self {
        if let Repr::Finite(a) = &self.repr {
            let mut map: BTreeMap<Marker, S> = a.iter().map(|(m, w)| (m.clone(), w.mul(s))).collect();
            map.retain(|_, w| !w.is_zero());
            return Self { space: self.space.clone(), level_bound: self.level_bound, repr: Repr::Finite(map) };
        }
        Self {
            space: self.space.clone(),
            level_bound: self.level_bound,
            repr: Repr::Combination(vec![(s.clone(), self.clone())]),
        }
    }

    /// `ν_1 − ν_2`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&S::one().neg()))
    }

    /// `|ν|` (finite clouds only).
    pub fn abs(&self) -> Result<Self> {
        let map = self.require_finite("absolute value")?;
        Ok(Self {
            space: self.space.clone(),
            level_bound: self.level_bound,
            repr: Repr::Finite(map.iter().map(|(m, w)| (m.clone(), w.abs())).collect()),
        })
    }

    /// Convolution `ν_1 * ν_2`.  Finite operands give a finite cloud whose
    /// level bound is the sum of the operands' bounds; otherwise the result
    /// is evaluated pointwise on demand.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.space.ensure_same(&other.space, "convolution")?;
        if self.is_finite() && other.is_finite() {
            return self.convolve_truncated(other, usize::MAX);
        }
        let level_bound = match (self.level_bound, other.level_bound) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Ok(Self {
            space: self.space.clone(),
            level_bound,
            repr: Repr::Product(Box::new(self.clone()), Box::new(other.clone())),
        })
    }

    /// Convolution of finite clouds, discarding markers above `max_level`.
    /// Values at levels `≤ max_level` are exact.
    pub fn convolve_truncated(&self, other: &Self, max_level: usize) -> Result<Self> {
        self.space.ensure_same(&other.space, "convolution")?;
        let a = self.require_finite("truncated convolution")?;
        let b = other.require_finite("truncated convolution")?;
        let mut by_first: Vec<Vec<(&Marker, &S)>> = vec![Vec::new(); self.space.len()];
        for (m, w) in b {
            by_first[m.first()].push((m, w));
        }
        let mut map: BTreeMap<Marker, S> = BTreeMap::new();
        for (m1, w1) in a {
            for &(m2, w2) in &by_first[m1.last()] {
                if m1.level() + m2.level() > max_level {
                    continue;
                }
                let m = m1.splice(m2).expect("matching endpoints");
                let slot = map.entry(m).or_insert_with(S::zero);
                *slot = slot.add(&w1.mul(w2));
            }
        }
        map.retain(|_, w| !w.is_zero());
        let mut c = Self::from_map(&self.space, map);
        c.level_bound = match (self.level_bound, other.level_bound) {
            (Some(x), Some(y)) => Some((x + y).min(max_level)),
            _ => c.level_bound,
        };
        Ok(c)
    }

    /// `ν^{*k}` (with `ν^{*0} = ρ^0`), truncated at `max_level`.
    pub fn power_truncated(&self, k: usize, max_level: usize) -> Result<Self> {
        let mut acc = Self::rho(&self.space, 0)?;
        for _ in 0..k {
            acc = acc.convolve_truncated(self, max_level)?;
        }
        Ok(acc)
    }

    /// The restriction to markers of level `≤ max_level`, as a finite cloud.
    /// Lazy clouds are evaluated on every such marker.
    pub fn truncate(&self, max_level: usize) -> Result<Self> {
        if let Repr::Finite(map) = &self.repr {
            let kept: BTreeMap<Marker, S> =
                map.iter().filter(|(m, _)| m.level() <= max_level).map(|(m, w)| (m.clone(), w.clone())).collect();
            let mut c = Self::from_map(&self.space, kept);
            c.level_bound = self.level_bound.map(|b| b.min(max_level));
            return Ok(c);
        }
        let markers = all_markers(self.space.len(), max_level, MARKER_NODE_CAP)?;
        let mut c = Self::finite(&self.space, markers.into_iter().map(|m| {
            let v = self.value(&m);
            (m, v)
        }))?;
        c.level_bound = Some(max_level);
        Ok(c)
    }

    /// The cloud norm `⫴ν⫴ = sup_η Σ_{σ≼η} |ν_σ|`; `None` means `+∞`.
    pub fn norm(&self) -> Result<Option<S>> {
        match &self.repr {
            Repr::Finite(map) => {
                let mut best = S::zero();
                for m in map.keys() {
                    let s = (0..=m.level()).fold(S::zero(), |acc, i| {
                        acc.add(&map.get(&m.prefix(i)).map(S::abs).unwrap_or_else(S::zero))
                    });
                    best = best.max_of(&s);
                }
                Ok(Some(best))
            }
            Repr::Balayage(l) => Ok(Some(if l.is_full() { S::zero() } else { S::one() })),
            Repr::One => Ok(None),
            Repr::OneOn(l) => Ok(if l.is_empty() { Some(S::zero()) } else { None }),
            _ => Err(Error::NotImplemented(format!(
                "norm of a {:?} cloud; truncate it first",
                self.kind()
            ))),
        }
    }

    /// `true` when every stored weight is `≥ 0` (finite clouds), or for
    /// the nonnegative specials.
    pub fn is_nonnegative(&self) -> Result<bool> {
        match &self.repr {
            Repr::Finite(map) => Ok(map.values().all(|w| !w.is_negative())),
            Repr::Balayage(_) | Repr::One | Repr::OneOn(_) => Ok(true),
            _ => Err(Error::NotImplemented(format!("sign of a {:?} cloud", self.kind()))),
        }
    }

    pub(crate) fn require_finite(&self, what: &str) -> Result<&BTreeMap<Marker, S>> {
        self.entries()
            .ok_or_else(|| Error::NotImplemented(format!("{what} of a {:?} cloud", self.kind())))
    }
}

fn max_bound(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    }
}

fn check_len(space: &SiteSpace, len: usize) -> Result<()> {
    if len != space.len() {
        return Err(Error::dimension(format!(
            "profile has {len} values for a space of {} sites",
            space.len()
        )));
    }
    Ok(())
}

/// Profile values converted to the scalar type.
pub(crate) fn profile_scalars<S: Scalar>(h: &Profile) -> Result<Vec<S>> {
    h.values().iter().map(|&v| S::from_f64(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dyadic;

    fn xy() -> SiteSpace {
        SiteSpace::new(["x", "y"]).unwrap()
    }

    #[test]
    fn rho_powers_multiply() {
        let s = xy();
        let r1 = Cloud::<Dyadic>::rho(&s, 1).unwrap();
        let r2 = Cloud::<Dyadic>::rho(&s, 2).unwrap();
        let r3 = Cloud::<Dyadic>::rho(&s, 3).unwrap();
        let p = r1.convolve(&r2).unwrap();
        assert_eq!(p.entries(), r3.entries());
        assert_eq!(p.level_bound(), Some(3));
    }

    #[test]
    fn rho_zero_is_a_unit() {
        let s = xy();
        let r0 = Cloud::<f64>::rho(&s, 0).unwrap();
        let nu = Cloud::finite(&s, [(Marker::new(vec![0, 1]).unwrap(), 0.5)]).unwrap();
        assert_eq!(r0.convolve(&nu).unwrap().entries(), nu.entries());
        assert_eq!(nu.convolve(&r0).unwrap().entries(), nu.entries());
    }

    #[test]
    fn beta_cumulative_is_one_minus_indicator() {
        let s = xy();
        let h = [Dyadic::pow2_neg(2), Dyadic::one()];
        let b = Cloud::beta(&s, &h).unwrap();
        assert_eq!(b.cumulative(&Marker::single(0)), Dyadic::new(3, -2));
        assert_eq!(b.cumulative(&Marker::single(1)), Dyadic::zero());
        assert_eq!(b.cumulative(&Marker::new(vec![0, 1, 1]).unwrap()), Dyadic::one());
    }

    #[test]
    fn special_cumulatives() {
        let s = xy();
        let lam = SiteSet::from_indices(&s, [0]).unwrap();
        let pi = Cloud::<f64>::balayage(&lam);
        assert_eq!(pi.value(&Marker::new(vec![0, 0, 1]).unwrap()), 1.0);
        assert_eq!(pi.value(&Marker::new(vec![0, 1, 1]).unwrap()), 0.0);
        assert_eq!(pi.cumulative(&Marker::new(vec![0, 1, 0]).unwrap()), 1.0);
        let one = Cloud::<f64>::one(&s);
        assert_eq!(one.cumulative(&Marker::new(vec![0, 1]).unwrap()), 2.0);
        assert_eq!(pi.norm().unwrap(), Some(1.0));
        assert_eq!(one.norm().unwrap(), None);
    }

    #[test]
    fn literal_round_trip() {
        let s = xy();
        let lit = CloudLiteral {
            markers: vec![MarkerWeight { path: vec!["x".into(), "y".into()], w: 0.5 }],
            level_bound: Some(2),
        };
        let c = Cloud::<f64>::from_literal(&s, &lit).unwrap();
        assert_eq!(c.level_bound(), Some(2));
        assert_eq!(c.to_literal().unwrap(), lit);
    }

    #[test]
    fn norm_of_finite_cloud() {
        let s = xy();
        let c = Cloud::finite(
            &s,
            [
                (Marker::single(0), -0.5),
                (Marker::new(vec![0, 1]).unwrap(), 0.25),
                (Marker::new(vec![1, 1]).unwrap(), 0.5),
            ],
        )
        .unwrap();
        assert_eq!(c.norm().unwrap(), Some(0.75));
    }
}

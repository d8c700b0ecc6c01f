//! Seeded generators of random instances for tests, benchmarks and the
//! acceptance suite.  Every generator is a pure function of its RNG state,
//! so a fixed seed reproduces the same instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cleaning_ops::{IdentityCheck, InequalityCheck};
use crate::cloud_algebra::{Cloud, CloudIdentity, Marker};
use crate::error::{Error, Result};
use crate::kernel_core::{
    check_fh, spectral_radius, DirtVector, Kernel, Profile, SiteSet, SiteSpace, WeightVector, DEFAULT_SPR_MAX_ITER,
    DEFAULT_SPR_TOL,
};
use crate::scalar::Scalar;

/// A kernel together with a verified positive subinvariant weight.
#[derive(Debug, Clone)]
pub struct FhInstance {
    /// The kernel `α`.
    pub kernel: Kernel,
    /// A strictly positive `w` with `αw ≤ w`.
    pub w: WeightVector,
}

/// A sparse contraction: kernel, region, dirt and weight `w ≡ 1`.
#[derive(Debug, Clone)]
pub struct ContractionInstance {
    /// The kernel `α` (row sums at most `rate` on `Λ`).
    pub kernel: Kernel,
    /// Region `Λ`.
    pub lambda: SiteSet,
    /// Dirt `c`, positive on `Λ`.
    pub c: DirtVector,
    /// Weight `w ≡ 1`.
    pub w: WeightVector,
}

/// A kernel on `n` sites where each entry is present with probability
/// `density` and uniform in `(0, max_entry]`.
pub fn random_kernel<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64, max_entry: f64) -> Kernel {
    let space = SiteSpace::indexed(n);
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(density) {
                entries.push((i, j, max_entry * (1.0 - rng.gen::<f64>())));
            }
        }
    }
    Kernel::new(&space, entries).expect("generated entries are nonnegative and in range")
}

/// A uniformly random subset of the space (nonempty when asked).
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, space: &SiteSpace, nonempty: bool) -> SiteSet {
    loop {
        let mask: Vec<bool> = (0..space.len()).map(|_| rng.gen_bool(0.5)).collect();
        if !nonempty || mask.iter().any(|&b| b) {
            return SiteSet::from_mask(space, mask).expect("mask has the space's length");
        }
    }
}

/// A random subset of `within` of size at least one when `within` is nonempty.
pub fn random_subset_of<R: Rng + ?Sized>(rng: &mut R, within: &SiteSet) -> SiteSet {
    let members = within.indices();
    if members.is_empty() {
        return within.clone();
    }
    let k = rng.gen_range(1..=members.len());
    let picked: Vec<usize> = members.choose_multiple(rng, k).copied().collect();
    SiteSet::from_indices(within.space(), picked).expect("members belong to the space")
}

/// A profile supported in `support` with values uniform in `[0, 1]`; each
/// value is replaced by exactly `1` or `0` with probability 1/8.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R, support: &SiteSet) -> Profile {
    let vals = (0..support.space().len())
        .map(|x| {
            if !support.contains(x) {
                return 0.0;
            }
            match rng.gen_range(0..8) {
                0 => 1.0,
                1 => 0.0,
                _ => rng.gen::<f64>(),
            }
        })
        .collect();
    Profile::new(support.space(), vals).expect("values lie in [0, 1]")
}

/// A profile with support exactly `support` and values in `[lo, 1]`.
pub fn random_profile_on<R: Rng + ?Sized>(rng: &mut R, support: &SiteSet, lo: f64) -> Profile {
    let vals = (0..support.space().len())
        .map(|x| if support.contains(x) { rng.gen_range(lo..=1.0) } else { 0.0 })
        .collect();
    Profile::new(support.space(), vals).expect("values lie in [0, 1]")
}

/// A profile `g` with `0 ≤ g ≤ h` pointwise.
pub fn random_profile_below<R: Rng + ?Sized>(rng: &mut R, h: &Profile) -> Profile {
    let vals = h.values().iter().map(|&v| v * rng.gen::<f64>()).collect();
    Profile::new(h.space(), vals).expect("values lie in [0, 1]")
}

/// A dirt vector supported in `support` with values in `(0, 1]`.
pub fn random_dirt<R: Rng + ?Sized>(rng: &mut R, support: &SiteSet) -> DirtVector {
    let vals = (0..support.space().len())
        .map(|x| if support.contains(x) { 1.0 - rng.gen::<f64>() } else { 0.0 })
        .collect();
    DirtVector::new(support.space(), vals).expect("values are nonnegative")
}

/// Spectral radius of `I_Λ α I_Λ`.
pub fn block_radius(alpha: &Kernel, lambda: &SiteSet) -> Result<f64> {
    spectral_radius(&alpha.restricted_to(lambda), DEFAULT_SPR_TOL, DEFAULT_SPR_MAX_ITER)
}

/// A random kernel on `n` sites admitting a positive subinvariant weight,
/// with a witness produced and verified by [`check_fh`].
///
/// Three shapes are mixed: strict contractions (spectral radius drawn in
/// `[0.3, 0.99]`), row-stochastic kernels (radius exactly 1 on every final
/// class) and sparse nilpotent-heavy kernels.
pub fn random_fh_instance<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<FhInstance> {
    for _ in 0..64 {
        let shape = rng.gen_range(0..4);
        let density = if shape == 3 { 0.25 } else { rng.gen_range(0.3..0.8) };
        let raw = random_kernel(rng, n, density, 1.0);
        let kernel = if shape == 1 {
            let space = raw.space().clone();
            let entries: Vec<(usize, usize, f64)> = (0..n)
                .flat_map(|i| {
                    let s: f64 = raw.row(i).iter().map(|e| e.1).sum();
                    raw.row(i).iter().map(move |&(j, v)| (i, j, v / s)).collect::<Vec<_>>()
                })
                .collect();
            Kernel::new(&space, entries)?
        } else {
            let r = spectral_radius(&raw, DEFAULT_SPR_TOL, DEFAULT_SPR_MAX_ITER)?;
            if r > 0.0 {
                raw.scaled(rng.gen_range(0.3..0.99) / r)?
            } else {
                raw
            }
        };
        let report = check_fh(&kernel)?;
        if let (true, Some(w)) = (report.holds, report.witness) {
            return Ok(FhInstance { kernel, w });
        }
    }
    Err(Error::contract("could not generate a verified FH instance in 64 attempts"))
}

/// Scales `α` down so that `spr(I_Λ α I_Λ) ≤ max_radius`; returns the
/// kernel unchanged when it already satisfies the bound.
pub fn cap_block_radius(alpha: &Kernel, lambda: &SiteSet, max_radius: f64) -> Result<Kernel> {
    let r = block_radius(alpha, lambda)?;
    if r <= max_radius {
        Ok(alpha.clone())
    } else {
        alpha.scaled(max_radius / r)
    }
}

/// A sparse contraction on `n` sites: every row has at most `out_degree`
/// entries and row sum at most `rate`, `Λ` is a random nonempty subset and
/// `c` is positive on `Λ`.
pub fn random_contraction_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    out_degree: usize,
    rate: f64,
) -> Result<ContractionInstance> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::contract("contraction rate must lie in [0, 1)"));
    }
    let space = SiteSpace::indexed(n);
    let sites: Vec<usize> = (0..n).collect();
    let mut entries = Vec::new();
    for i in 0..n {
        let d = rng.gen_range(0..=out_degree.min(n));
        let targets: Vec<usize> = sites.choose_multiple(rng, d).copied().collect();
        let raw: Vec<f64> = targets.iter().map(|_| 1.0 - rng.gen::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let sum = rate * rng.gen_range(0.5..=1.0);
        for (&j, v) in targets.iter().zip(raw) {
            entries.push((i, j, sum * v / total));
        }
    }
    let kernel = Kernel::new(&space, entries)?;
    let lambda = random_subset(rng, &space, true);
    let c = random_dirt(rng, &lambda);
    Ok(ContractionInstance { kernel, lambda, c, w: WeightVector::ones(&space) })
}

/// A finite cloud with `markers` random markers of level `≤ max_level`
/// and weights on the grid `k/16`, `k ∈ [0, 16]` (signed when
/// `signed`); exact in every scalar type.
pub fn random_cloud<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    space: &SiteSpace,
    max_level: usize,
    markers: usize,
    signed: bool,
) -> Cloud<S> {
    let n = space.len();
    let entries: Vec<(Marker, S)> = (0..markers)
        .map(|_| {
            let level = rng.gen_range(0..=max_level);
            let path = (0..=level).map(|_| rng.gen_range(0..n)).collect();
            let k = rng.gen_range(0..=16) as f64;
            let v = if signed && rng.gen_bool(0.5) { -k } else { k } / 16.0;
            (Marker::new(path).expect("nonempty path"), S::from_f64(v).expect("grid values are exact"))
        })
        .collect();
    Cloud::finite(space, entries).expect("paths use valid sites")
}


/// A random region on which `I_Λ α I_Λ` has spectral radius below
/// `1 − 1e-6` (sites are dropped at random until it does; the empty
/// region always qualifies).
pub fn random_cleanable_subset<R: Rng + ?Sized>(rng: &mut R, alpha: &Kernel) -> Result<SiteSet> {
    let mut members = random_subset(rng, alpha.space(), false).indices();
    loop {
        let set = SiteSet::from_indices(alpha.space(), members.iter().copied())?;
        if set.is_empty() || block_radius(alpha, &set)? < 1.0 - 1e-6 {
            return Ok(set);
        }
        let drop = rng.gen_range(0..members.len());
        members.remove(drop);
    }
}

fn profiles<R: Rng + ?Sized>(rng: &mut R, support: &SiteSet, n: usize) -> Vec<Profile> {
    (0..n).map(|_| random_profile(rng, support)).collect()
}

/// A profile equal to 1 on `Λ` and random in `[0, 1]` elsewhere.
fn dominating_profile<R: Rng + ?Sized>(rng: &mut R, lambda: &SiteSet) -> Profile {
    let vals = (0..lambda.space().len()).map(|x| if lambda.contains(x) { 1.0 } else { rng.gen() }).collect();
    Profile::new(lambda.space(), vals).expect("values lie in [0, 1]")
}

/// Profiles supported in `Λ` whose supports together cover `Λ`.
fn covering_profiles<R: Rng + ?Sized>(rng: &mut R, lambda: &SiteSet, m: usize) -> Vec<Profile> {
    let n = lambda.space().len();
    let mut vals = vec![vec![0.0; n]; m];
    for x in lambda.iter() {
        let owner = rng.gen_range(0..m);
        for (i, v) in vals.iter_mut().enumerate() {
            if i == owner || rng.gen_bool(0.3) {
                v[x] = rng.gen_range(0.05..=1.0);
            }
        }
    }
    vals.into_iter().map(|v| Profile::new(lambda.space(), v).expect("values lie in [0, 1]")).collect()
}

/// `N` profiles supported in `Λ`, `k + 1` strictly increasing block
/// boundaries, and `g_j` below the collapse of each block.
fn blocks<R: Rng + ?Sized>(rng: &mut R, lambda: &SiteSet) -> (Vec<Profile>, Vec<Profile>, Vec<usize>) {
    let n_h = rng.gen_range(1..=4);
    let h = profiles(rng, lambda, n_h);
    let mut cuts: Vec<usize> = (0..=n_h).filter(|_| rng.gen_bool(0.6)).collect();
    if cuts.len() < 2 {
        cuts = vec![0, n_h];
    }
    let g = cuts
        .windows(2)
        .map(|w| random_profile_below(rng, &Profile::collapse(lambda.space(), h[w[0]..w[1]].iter())))
        .collect();
    (h, g, cuts)
}

/// Random inputs for the identity verifier `name` on `(α, Λ)`.  `Λ` must
/// make `I_Λ α I_Λ` a contraction for the statements involving `Π_Λ`.
pub fn sample_identity_check<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: &Kernel,
    lambda: &SiteSet,
    name: &str,
) -> Result<IdentityCheck> {
    let space = alpha.space();
    let full = SiteSet::full(space);
    let lambda = lambda.clone();
    let n_prod = rng.gen_range(1..=4);
    Ok(match name {
        "intertwining_I" => IdentityCheck::IntertwiningI { h: random_profile(rng, &full) },
        "intertwining_II" => {
            IdentityCheck::IntertwiningII { h1: random_profile(rng, &full), h2: random_profile(rng, &full) }
        }
        "comparison" => IdentityCheck::Comparison { h1: random_profile(rng, &full), h2: random_profile(rng, &full) },
        "collapse" => IdentityCheck::Collapse { h1: random_profile(rng, &full), h2: random_profile(rng, &full) },
        "telescoping" => IdentityCheck::Telescoping { g: profiles(rng, &full, n_prod), h: profiles(rng, &full, n_prod) },
        "restricted_support" => {
            let g = profiles(rng, &lambda, n_prod);
            let h = (0..n_prod)
                .map(|_| (0..space.len()).map(|x| if lambda.contains(x) { 1.0 } else { rng.gen_range(-2.0..2.0) }).collect())
                .collect();
            IdentityCheck::RestrictedSupport { lambda, g, h }
        }
        "pi_properties" => IdentityCheck::PiProperties { h: random_profile(rng, &lambda), lambda },
        "convergence_to_balayage" => {
            IdentityCheck::ConvergenceToBalayage { h: profiles(rng, &lambda, n_prod), lambda }
        }
        "geometric_identity" => IdentityCheck::GeometricIdentity { h: random_profile_on(rng, &lambda, 0.05), lambda },
        _ => return Err(Error::contract(format!("unknown identity `{name}`"))),
    })
}

/// Random inputs for the inequality verifier `name` on `(α, Λ)`.  `Λ`
/// must make `I_Λ α I_Λ` a contraction for the statements involving `Π_Λ`.
pub fn sample_inequality_check<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: &Kernel,
    lambda: &SiteSet,
    name: &str,
) -> Result<InequalityCheck> {
    use InequalityCheck::*;
    let space = alpha.space();
    let lambda = lambda.clone();
    let n_prod = rng.gen_range(1..=4);
    let ordered = |rng: &mut R| -> (Vec<Profile>, Vec<Profile>) {
        let strong = profiles(rng, &lambda, n_prod);
        let weak = strong.iter().map(|p| random_profile_below(rng, p)).collect();
        (weak, strong)
    };
    Ok(match name {
        "flow_positivity" => FlowPositivity {
            f: dominating_profile(rng, &lambda),
            h: profiles(rng, &lambda, n_prod),
            lambda: lambda.clone(),
        },
        "multi_monotonicity" => {
            let (g, h) = ordered(rng);
            MultiMonotonicity { f: dominating_profile(rng, &lambda), g, h, lambda }
        }
        "collapse_inequality" => CollapseInequality {
            f: dominating_profile(rng, &lambda),
            g: profiles(rng, &lambda, n_prod),
            h: {
                let k = rng.gen_range(0..=2);
                profiles(rng, &lambda, k)
            },
            lambda: lambda.clone(),
        },
        "block_collapse" => {
            let (h, g, breaks) = blocks(rng, &lambda);
            BlockCollapse { f: dominating_profile(rng, &lambda), h, g, breaks, lambda }
        }
        "reverse_flow" => ReverseFlow { h: profiles(rng, &lambda, n_prod), lambda },
        "reverse_multi_monotonicity" => {
            let (h, g) = ordered(rng);
            ReverseMultiMonotonicity { g, h, lambda }
        }
        "reverse_collapse" => ReverseCollapse {
            g: profiles(rng, &lambda, n_prod),
            h: {
                let k = rng.gen_range(0..=2);
                profiles(rng, &lambda, k)
            },
            lambda: lambda.clone(),
        },
        "reverse_block_collapse" => {
            let (h, g, breaks) = blocks(rng, &lambda);
            ReverseBlockCollapse { h, g, breaks, lambda }
        }
        "balayage_comparison" => BalayageComparison {
            h: profiles(rng, &lambda, n_prod),
            c: random_dirt(rng, &SiteSet::full(space)),
            lambda: lambda.clone(),
        },
        "cleaner_comparison" => {
            let (g, h) = ordered(rng);
            let mut breaks: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..=n_prod)).collect();
            breaks.sort_unstable();
            CleanerComparison { g, h, breaks, c: random_dirt(rng, &SiteSet::full(space)), lambda }
        }
        "geometric_inequality" => GeometricInequality { f: profiles(rng, &lambda, n_prod), lambda },
        "geometric_reverse" => GeometricReverse { f: covering_profiles(rng, &lambda, n_prod), lambda },
        "betastar_sum" => BetaStarSum { f: profiles(rng, &SiteSet::full(space), n_prod) },
        _ => return Err(Error::contract(format!("unknown inequality `{name}`"))),
    })
}

/// Profile values on the grid `k/8` (exact in every scalar type); with
/// `support` given, zero outside it and at least `lo` on it.
fn grid_profile<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, support: Option<&SiteSet>, lo: u32) -> Vec<S> {
    (0..n)
        .map(|x| {
            let k = match support {
                Some(s) if !s.contains(x) => 0,
                Some(_) => rng.gen_range(lo..=8),
                None => rng.gen_range(0..=8),
            };
            S::from_f64(k as f64 / 8.0).expect("grid values are exact")
        })
        .collect()
}

/// A product of one or two `β_h` clouds with `supp h ⊆ Λ`: `Λ`-regular.
fn regular_cloud<S: Scalar, R: Rng + ?Sized>(rng: &mut R, lambda: &SiteSet) -> Result<Cloud<S>> {
    let n = lambda.space().len();
    let mut c = Cloud::beta(lambda.space(), &grid_profile::<S, R>(rng, n, Some(lambda), 1))?;
    if rng.gen_bool(0.5) {
        c = c.convolve(&Cloud::beta(lambda.space(), &grid_profile::<S, R>(rng, n, Some(lambda), 1))?)?;
    }
    Ok(c)
}

/// Random inputs for the cloud verifier `name` on `space`, with weights
/// on dyadic grids so that exact scalars verify exactly.
pub fn sample_cloud_identity<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    space: &SiteSpace,
    name: &str,
) -> Result<CloudIdentity<S>> {
    let n = space.len();
    let lambda = random_subset(rng, space, true);
    let nonneg = |rng: &mut R| {
        let k = rng.gen_range(1..=5);
        random_cloud::<S, R>(rng, space, 2, k, false)
    };
    Ok(match name {
        "cumulative_convolution" => CloudIdentity::CumulativeConvolution {
            mu: random_cloud(rng, space, 2, 5, true),
            nu: random_cloud(rng, space, 2, 5, true),
        },
        "cumulative_beta" => {
            CloudIdentity::CumulativeBeta { mu: random_cloud(rng, space, 2, 5, true), h: grid_profile(rng, n, None, 0) }
        }
        "collapse" => CloudIdentity::Collapse { g: grid_profile(rng, n, None, 0), h: grid_profile(rng, n, None, 0) },
        "cumulative_inequality" => CloudIdentity::CumulativeInequality { mu: nonneg(rng), nu: nonneg(rng) },
        "geometric_series" => {
            CloudIdentity::GeometricSeries { h: grid_profile(rng, n, Some(&lambda), 2), terms: 3 }
        }
        "series_bounds" => {
            let nu = if rng.gen_bool(0.5) {
                regular_cloud(rng, &lambda)?
            } else {
                // Scale a nonnegative cloud to norm ≤ 1/2 by a power of 2.
                let c: Cloud<S> = nonneg(rng);
                let norm = c.norm()?.map(|v| v.to_f64()).unwrap_or(0.0);
                let k = (2.0 * norm).max(1.0).log2().ceil() as u32;
                c.scale(&S::pow2_neg(k))
            };
            CloudIdentity::SeriesBounds { nu, lambda, terms: 3 }
        }
        "regular_comparison" => CloudIdentity::RegularComparison {
            mu: regular_cloud(rng, &lambda)?,
            nu: regular_cloud(rng, &lambda)?,
            lambda,
        },
        "balayage_decomposition" => CloudIdentity::BalayageDecomposition { mu: regular_cloud(rng, &lambda)?, lambda },
        "balayage_absorption" => CloudIdentity::BalayageAbsorption { mu: regular_cloud(rng, &lambda)?, lambda },
        "regular_left_unit" => CloudIdentity::RegularLeftUnit { mu: regular_cloud(rng, &lambda)?, lambda },
        _ => return Err(Error::contract(format!("unknown cloud identity `{name}`"))),
    })
}

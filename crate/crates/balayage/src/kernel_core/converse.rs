//! The converse battery: for a region `Λ`, dirt `c` and weight `w`
//! (both positive on `Λ`), evaluates the seven equivalent cleanability
//! conditions
//!
//! * (a)  `Σ_k c (I_Λ α I_Λ)^k w < ∞`;
//! * (b)  the same for `I_Λ β_h I_Λ`, every `h` with `supp h = Λ`;
//! * (b′) the same for some `h` with `supp h ⊆ Λ`;
//! * (c)  the same for `I_Λ β_{f_1}⋯β_{f_m} I_Λ`, every sequence whose
//!   sum has support `Λ`;
//! * (c′) the same for some sequence supported in `Λ`;
//! * (d)  the same for `I_Λ T_ν I_Λ`, every `ν ≥ 0` carried by `Λ` with
//!   `⫴ν⫴ ≤ 1` and `ν((x)) < 1` on `Λ`;
//! * (d′) the same for some `ν ∈ 𝒮_1` carried by `Λ` on finitely many levels,
//!
//! together with the hypothesis `I_Λ α I_Λ w ≤ C w` that makes the
//! existential forms equivalent to the universal ones.
//!
//! On a finite `Λ` each series converges iff the spectral radius of its
//! `Λ`-block is below 1, which gives the verdicts.  Universal conditions
//! are evaluated on a deterministic sample of admissible inputs and
//! existential ones on a deterministic list of candidates; every report
//! also carries the truncated series so that growth across truncations of
//! an infinite family can be observed directly.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::kernel::Kernel;
use super::space::{SiteSet, SiteSpace};
use super::spectral::{spectral_radius, DEFAULT_SPR_MAX_ITER, DEFAULT_SPR_TOL};
use super::vectors::{DirtVector, Profile, WeightVector};
use crate::cloud_algebra::{realize, Cloud};
use crate::dense::{self, beta_product, indicator};
use crate::error::{Error, Result};

/// A spectral radius counts as `< 1` when it is below `1 − CONVERSE_SPR_MARGIN`.
pub const CONVERSE_SPR_MARGIN: f64 = 1e-9;

/// Names of the battery conditions, in canonical order.
pub const CONVERSE_CONDITIONS: [&str; 7] = ["a", "b", "b'", "c", "c'", "d", "d'"];

/// A nonnegative quantity that may exceed floating-point range: an
/// explicit overflow sentinel keeps the last finite truncated value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    /// A finite value.
    Finite {
        /// The value.
        value: f64,
    },
    /// The value overflowed; `truncated` is the last finite partial value,
    /// reached at `parameter` (a term count or truncation level).
    Unbounded {
        /// Last finite partial value.
        truncated: f64,
        /// Where the overflow happened.
        parameter: usize,
    },
}

impl Quantity {
    /// The finite value, if any.
    pub fn finite(&self) -> Option<f64> {
        match self {
            Quantity::Finite { value } => Some(*value),
            Quantity::Unbounded { .. } => None,
        }
    }

    /// The value, or `+∞` for the sentinel.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// Tuning of [`converse_battery`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverseOptions {
    /// Number of series terms `K` in the reported partial sums.
    pub series_terms: usize,
    /// Random admissible inputs drawn per universal condition.
    pub samples: usize,
    /// Longest profile sequence drawn for (c) and (d).
    pub max_factors: usize,
    /// Seed of the sampler.
    pub seed: u64,
}

impl Default for ConverseOptions {
    fn default() -> Self {
        Self { series_terms: 200, samples: 12, max_factors: 3, seed: 0 }
    }
}

/// One evaluated condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    /// Condition name (`"a"`, `"b"`, `"b'"`, …).
    pub name: String,
    /// Verdict.
    pub holds: bool,
    /// `"for_all"`, `"exists"` or `"single"`.
    pub quantifier: String,
    /// Number of inputs examined.
    pub candidates: usize,
    /// Spectral radius of the deciding input: the largest over the sample
    /// for universal conditions, the smallest over the candidates for
    /// existential ones.
    pub spectral_radius: f64,
    /// `Σ_{k<K} c M^k w` for the deciding input.
    pub partial_sum: Quantity,
    /// The last summed term `c M^{K−1} w`.
    pub last_term: Quantity,
    /// Description of the deciding input.
    pub deciding_input: String,
}

/// Output of [`converse_battery`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseReport {
    /// Sites of `Λ`.
    pub lambda: Vec<String>,
    /// `C = max_{x∈Λ} (I_Λ α I_Λ w)_x / w_x`.
    pub hypothesis_constant: f64,
    /// The hypothesis holds (always, on a finite `Λ`).
    pub hypothesis_holds: bool,
    /// Terms `K` of every reported partial sum.
    pub series_terms: usize,
    /// The seven conditions in canonical order.
    pub conditions: Vec<ConditionResult>,
    /// All seven verdicts agree.
    pub all_agree: bool,
}

impl ConverseReport {
    /// The condition called `name`.
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Verdicts of the named conditions agree with each other.
    pub fn agree(&self, names: &[&str]) -> bool {
        let v: Vec<bool> = names.iter().filter_map(|n| self.condition(n)).map(|c| c.holds).collect();
        v.windows(2).all(|p| p[0] == p[1])
    }
}

/// An evaluated candidate `Λ`-block.
struct Evaluated {
    spr: f64,
    partial: Quantity,
    last: Quantity,
    label: String,
}

struct Block {
    idx: Vec<usize>,
    c: Vec<f64>,
    w: Vec<f64>,
    terms: usize,
}

impl Block {
    /// Evaluates the `Λ`-block of the full matrix `m`.
    fn evaluate(&self, m: &DMatrix<f64>, label: String) -> Result<Evaluated> {
        let k = self.idx.len();
        let sub = DMatrix::from_fn(k, k, |i, j| m[(self.idx[i], self.idx[j])].max(0.0));
        let local = SiteSpace::indexed(k.max(1));
        let spr = if k == 0 {
            0.0
        } else {
            spectral_radius(&Kernel::from_dense(&local, &sub)?, DEFAULT_SPR_TOL, DEFAULT_SPR_MAX_ITER)?
        };
        let (partial, last) = partial_series(&self.c, &sub, &self.w, self.terms);
        Ok(Evaluated { spr, partial, last, label })
    }
}

/// `Σ_{k<K} c M^k w` and its last term, with the overflow sentinel.
pub fn partial_series(c: &[f64], m: &DMatrix<f64>, w: &[f64], terms: usize) -> (Quantity, Quantity) {
    let wv = DVector::from_column_slice(w);
    let mut row = DVector::from_column_slice(c).transpose();
    let mut total = 0.0f64;
    let mut last = 0.0f64;
    for k in 0..terms {
        let t = (&row * &wv)[(0, 0)];
        if !(total + t).is_finite() {
            let sentinel = Quantity::Unbounded { truncated: total, parameter: k };
            return (sentinel, Quantity::Unbounded { truncated: last, parameter: k });
        }
        total += t;
        last = t;
        row = &row * m;
    }
    (Quantity::Finite { value: total }, Quantity::Finite { value: last })
}

fn decide(name: &str, quantifier: &str, evals: Vec<Evaluated>) -> ConditionResult {
    let n = evals.len();
    let pick = |e: &Evaluated| e.spr;
    let deciding = if quantifier == "exists" {
        evals.into_iter().min_by(|a, b| pick(a).total_cmp(&pick(b)))
    } else {
        evals.into_iter().max_by(|a, b| pick(a).total_cmp(&pick(b)))
    };
    let d = deciding.expect("every condition has at least one input");
    ConditionResult {
        name: name.to_string(),
        holds: d.spr < 1.0 - CONVERSE_SPR_MARGIN,
        quantifier: quantifier.to_string(),
        candidates: n,
        spectral_radius: d.spr,
        partial_sum: d.partial,
        last_term: d.last,
        deciding_input: d.label,
    }
}

fn describe(ps: &[Profile], space: &SiteSpace) -> String {
    let parts: Vec<String> = ps
        .iter()
        .map(|p| {
            let vals: Vec<String> = p.support().iter().map(|x| format!("{}:{:.4}", space.name(x), p.get(x))).collect();
            format!("{{{}}}", vals.join(","))
        })
        .collect();
    parts.join(" ")
}

/// A profile supported exactly on `Λ` with values in `[lo, 1]`.
fn random_profile_on(rng: &mut ChaCha8Rng, lambda: &SiteSet, lo: f64) -> Result<Profile> {
    let vals = (0..lambda.space().len())
        .map(|x| if lambda.contains(x) { rng.gen_range(lo..=1.0) } else { 0.0 })
        .collect();
    Profile::new(lambda.space(), vals)
}

/// A sequence of `m` profiles supported in `Λ` whose supports cover `Λ`.
fn random_covering_sequence(rng: &mut ChaCha8Rng, lambda: &SiteSet, m: usize) -> Result<Vec<Profile>> {
    let n = lambda.space().len();
    let mut vals = vec![vec![0.0; n]; m];
    for x in lambda.iter() {
        let owner = rng.gen_range(0..m);
        for (i, v) in vals.iter_mut().enumerate() {
            if i == owner || rng.gen_bool(0.4) {
                v[x] = rng.gen_range(0.05..=1.0);
            }
        }
    }
    vals.into_iter().map(|v| Profile::new(lambda.space(), v)).collect()
}

/// Evaluates the battery on a finite region.
///
/// `c` and `w` must be strictly positive on `Λ`.  An empty `Λ` makes every
/// condition hold vacuously.
pub fn converse_battery(
    alpha: &Kernel,
    lambda: &SiteSet,
    c: &DirtVector,
    w: &WeightVector,
    opts: &ConverseOptions,
) -> Result<ConverseReport> {
    let space = alpha.space();
    space.ensure_same(lambda.space(), "region")?;
    space.ensure_same(c.space(), "dirt")?;
    space.ensure_same(w.space(), "weight")?;
    if let Some(x) = lambda.iter().find(|&x| c.get(x) <= 0.0) {
        return Err(Error::contract(format!("dirt must be strictly positive on Λ (site {})", space.name(x))));
    }
    if opts.series_terms == 0 || opts.max_factors == 0 {
        return Err(Error::contract("series_terms and max_factors must be positive"));
    }
    let a = dense::kernel_dense(alpha)?;
    let il = indicator(lambda);
    let idx = lambda.indices();
    let block = Block {
        c: idx.iter().map(|&x| c.get(x)).collect(),
        w: idx.iter().map(|&x| w.get(x)).collect(),
        idx,
        terms: opts.series_terms,
    };
    let hypothesis_constant = block
        .idx
        .iter()
        .map(|&x| block.idx.iter().map(|&y| a[(x, y)] * w.get(y)).sum::<f64>() / w.get(x))
        .fold(0.0f64, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let chi = Profile::indicator(lambda);
    let sandwich = |m: DMatrix<f64>| &il * m * &il;
    let product = |ps: &[Profile]| sandwich(beta_product(&a, &ps.iter().collect::<Vec<_>>()));

    // (a)
    let cond_a = decide("a", "single", vec![block.evaluate(&sandwich(a.clone()), "I_Λ α I_Λ".into())?]);

    // Profiles with support Λ: fixed levels, then random ones.
    let mut full_h = vec![chi.clone(), Profile::scaled_indicator(lambda, 0.5)];
    for _ in 0..opts.samples {
        let lo = if rng.gen_bool(0.5) { 0.01 } else { 0.5 };
        full_h.push(random_profile_on(&mut rng, lambda, lo)?);
    }
    let mut eval_b = Vec::new();
    for h in &full_h {
        eval_b.push(block.evaluate(&product(std::slice::from_ref(h)), describe(std::slice::from_ref(h), space))?);
    }
    let cond_b = decide("b", "for_all", eval_b);
    // (b′) ranges over supp h ⊆ Λ, which includes h = 0 (β_0 = I).
    let mut eval_b1 = vec![block.evaluate(&sandwich(DMatrix::identity(a.nrows(), a.ncols())), "h = 0".into())?];
    for h in &full_h {
        eval_b1.push(block.evaluate(&product(std::slice::from_ref(h)), describe(std::slice::from_ref(h), space))?);
    }
    let cond_b1 = decide("b'", "exists", eval_b1);

    // Sequences covering Λ.
    let mut seqs: Vec<Vec<Profile>> = vec![vec![chi.clone(), chi.clone()]];
    for _ in 0..opts.samples {
        let m = rng.gen_range(1..=opts.max_factors);
        seqs.push(random_covering_sequence(&mut rng, lambda, m)?);
    }
    let mut eval_c = Vec::new();
    for s in &seqs {
        eval_c.push(block.evaluate(&product(s), describe(s, space))?);
    }
    let cond_c = decide("c", "for_all", eval_c);
    let mut eval_c1 = Vec::new();
    for s in seqs.iter().chain(std::iter::once(&vec![chi.clone()])) {
        eval_c1.push(block.evaluate(&product(s), describe(s, space))?);
    }
    let cond_c1 = decide("c'", "exists", eval_c1);

    // Clouds: scaled β-products realized through the cloud calculus.  A
    // β-product with every factor positive on Λ, scaled by s ∈ (0, 1], is
    // nonnegative, carried by Λ, has norm ≤ 1 and ν((x)) < 1 on Λ.
    let mut eval_d = Vec::new();
    let mut eval_d1 = Vec::new();
    for (i, s) in seqs.iter().enumerate() {
        let mut nu = Cloud::<f64>::rho(space, 0)?;
        for p in s {
            nu = nu.convolve(&Cloud::beta_profile(p)?)?;
        }
        let t = realize(&nu, alpha)?;
        let label = format!("ν = β-product {}", describe(s, space));
        eval_d1.push(block.evaluate(&sandwich(t.clone()), label.clone())?);
        let scale = if i == 0 { 1.0 } else { rng.gen_range(0.25..=1.0) };
        eval_d.push(block.evaluate(&sandwich(t * scale), format!("{scale:.4}·{label}"))?);
    }
    let cond_d = decide("d", "for_all", eval_d);
    let cond_d1 = decide("d'", "exists", eval_d1);

    let conditions = vec![cond_a, cond_b, cond_b1, cond_c, cond_c1, cond_d, cond_d1];
    let all_agree = conditions.windows(2).all(|p| p[0].holds == p[1].holds);
    Ok(ConverseReport {
        lambda: lambda.names(),
        hypothesis_constant,
        hypothesis_holds: hypothesis_constant.is_finite(),
        series_terms: opts.series_terms,
        conditions,
        all_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(scale: f64) -> (Kernel, SiteSet, DirtVector, WeightVector) {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0)]).unwrap().scaled(scale).unwrap();
        let lam = SiteSet::from_indices(&s, [0, 1]).unwrap();
        let c = DirtVector::new(&s, vec![1.0, 1.0, 0.0]).unwrap();
        (k, lam, c, WeightVector::ones(&s))
    }

    #[test]
    fn contraction_makes_all_conditions_hold() {
        let (k, lam, c, w) = instance(0.7);
        let r = converse_battery(&k, &lam, &c, &w, &ConverseOptions::default()).unwrap();
        assert!(r.all_agree);
        assert!(r.conditions.iter().all(|c| c.holds));
        assert!((r.hypothesis_constant - 0.7).abs() < 1e-12);
        // Σ_k 2·0.7^k, truncated at K = 200.
        let want = 2.0 / 0.3;
        assert!((r.condition("a").unwrap().partial_sum.to_f64() - want).abs() < 1e-9);
    }

    #[test]
    fn unit_radius_makes_all_conditions_fail() {
        let (k, lam, c, w) = instance(1.0);
        let r = converse_battery(&k, &lam, &c, &w, &ConverseOptions::default()).unwrap();
        assert!(r.all_agree);
        assert!(r.conditions.iter().all(|c| !c.holds));
    }

    #[test]
    fn empty_region_is_vacuous() {
        let (k, _, c, w) = instance(2.0);
        let lam = SiteSet::empty(k.space());
        let r = converse_battery(&k, &lam, &c, &w, &ConverseOptions::default()).unwrap();
        assert!(r.conditions.iter().all(|c| c.holds));
    }

    #[test]
    fn overflow_is_reported_as_sentinel() {
        let m = DMatrix::from_element(1, 1, 1e200);
        let (s, _) = partial_series(&[1.0], &m, &[1.0], 10);
        assert!(matches!(s, Quantity::Unbounded { parameter: 2, .. }));
    }
}

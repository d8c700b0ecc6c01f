//! The branching tree `X = {0} ∪ {(k, ℓ) : 1 ≤ k ≤ ℓ}` with two kernels:
//! the adversarial one, on which a sweep order visiting every site
//! infinitely often makes the dirt blow up, and the `γ`-weighted one, on
//! which the branch-by-branch order cleans everything although
//! `c α^k w = ρ_k` is arbitrary.

use serde::Serialize;

use super::params::Sequence;
use super::{GalleryInstance, Params};
use crate::error::{Error, Result};
use crate::io::Instance;
use crate::kernel_core::{DirtVector, Kernel, Profile, SiteSpace, WeightVector};
use crate::scalar::{Dyadic, Scalar};
use crate::sweep_engine::{adversarial_order, branchwise_order, non_summit_sweep, summit_sweep, SparseDirt, TreeSite};

/// Largest tree built explicitly by the gallery.
pub const TREE_SITE_CAP: usize = 200_000;

fn tree_space(depth: usize) -> Result<SiteSpace> {
    let n = TreeSite::count(depth);
    if n > TREE_SITE_CAP {
        return Err(Error::contract(format!(
            "a tree of depth {depth} has {n} sites, above the explicit cap {TREE_SITE_CAP}"
        )));
    }
    SiteSpace::new((0..n).map(|i| TreeSite::from_index(i).to_string()))
}

fn point_profiles(space: &SiteSpace, order: &[TreeSite]) -> Vec<Profile> {
    order.iter().map(|s| Profile::point(space, s.index(), 1.0)).collect()
}

fn rho_param(params: &mut Params) -> Result<Sequence> {
    Sequence::parse(params.f64_list("rho", "1")?, "rho")
}

/// `α_{0,(1,ℓ)} = ρ_1/(2^ℓ ρ_0)` and `α_{(k,ℓ),(k+1,ℓ)} = 2ρ_{k+1}/ρ_k`,
/// truncated to branches `1..=depth`.
pub fn adversarial_kernel(rho: &Sequence, depth: usize) -> Result<Kernel> {
    let space = tree_space(depth)?;
    let mut entries = Vec::new();
    let (r0, r1) = (rho.get(0)?, rho.get(1)?);
    for l in 1..=depth {
        entries.push((0, TreeSite::Node(1, l).index(), r1 / (2f64.powi(l as i32) * r0)));
        for k in 1..l {
            entries.push((TreeSite::Node(k, l).index(), TreeSite::Node(k + 1, l).index(), 2.0 * rho.get(k + 1)? / rho.get(k)?));
        }
    }
    Kernel::new(&space, entries)
}

/// The adversarial tree truncated to `depth` branches, with `c = ρ_0 δ_0`,
/// `w ≡ 1` and the order `0, A_{L_1}, B_1, A_{L_2}, B_2, …` for the given
/// stage depths (default: a single stage `L_1 = depth`).
pub fn adversarial_tree(params: &mut Params) -> Result<GalleryInstance> {
    let rho = rho_param(params)?;
    let depth = params.usize("depth", 6)?;
    let stages = params.usize_list("stages", &depth.to_string())?;
    if depth == 0 {
        return Err(Error::contract("adversarial_tree needs depth ≥ 1"));
    }
    if stages.iter().any(|&l| l > depth) {
        return Err(Error::contract("stage depths must not exceed the tree depth"));
    }
    let kernel = adversarial_kernel(&rho, depth)?;
    let space = kernel.space().clone();
    let (order, _) = adversarial_order(&stages)?;
    let mut inst = Instance::new(kernel);
    inst.c = Some(DirtVector::new(&space, {
        let mut v = vec![0.0; space.len()];
        v[0] = rho.get(0)?;
        v
    })?);
    inst.w = Some(WeightVector::ones(&space));
    inst.profiles = point_profiles(&space, &order);
    Ok(GalleryInstance::new(
        "adversarial_tree",
        inst,
        format!(
            "branches ℓ > {depth} are dropped, so c α^k w = ρ_k (1 − 2^-(depth−k+1)) instead of ρ_k; \
             summit masses of swept branches are exact"
        ),
    ))
}

/// Smallest `L ≥ r` with `Σ_{ℓ=r}^{L} ρ_ℓ/2 ≥ 10^r + ρ_r/2` (exact arithmetic).
pub fn adversarial_stage_depth(rho: &Sequence, r: usize, max_depth: usize) -> Result<usize> {
    let half = Dyadic::pow2_neg(1);
    let target = Dyadic::from_int(10i64.pow(r as u32)).add(&Dyadic::from_f64(rho.get(r)?)?.mul(&half));
    let mut sum = Dyadic::zero();
    for l in r..=max_depth {
        sum = sum.add(&Dyadic::from_f64(rho.get(l)?)?.mul(&half));
        if target <= sum {
            return Ok(l);
        }
    }
    Err(Error::contract(format!("no stage depth ≤ {max_depth} reaches mass 10^{r}")))
}

/// Summit masses around one stage of the adversarial order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarialStage {
    /// Stage `r`.
    pub stage: usize,
    /// `L_r`.
    pub depth: usize,
    /// Sweeps performed when `A_{L_r}` ends.
    pub steps_after_a: usize,
    /// Sweeps performed when `B_r` ends.
    pub steps_after_b: usize,
    /// Total summit mass after `A_{L_r}`.
    pub summit_mass_after_a: f64,
    /// Exact rendering of the same.
    pub summit_mass_after_a_exact: String,
    /// Total summit mass after `B_r`.
    pub summit_mass_after_b: f64,
    /// Exact rendering of the same.
    pub summit_mass_after_b_exact: String,
    /// `10^r`.
    pub target: f64,
    /// Both summit masses are at least `10^r`.
    pub reached: bool,
}

/// Output of [`run_adversarial_tree`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarialRun {
    /// One record per stage.
    pub stages: Vec<AdversarialStage>,
    /// Depth of the implicit tree (`L` of the last stage).
    pub tree_depth: usize,
    /// Sites of the implicit tree.
    pub tree_sites: usize,
    /// Largest number of simultaneously charged sites.
    pub peak_charged: usize,
    /// Total sweeps.
    pub steps: usize,
}

/// Runs `0, A_{L_1}, B_1, …, A_{L_R}, B_R` on the implicit tree of depth
/// `L_R` with exact dyadic dirt.
///
/// The sweep is carried out in the coordinates `u_{(k,ℓ)} = mass/ρ_k`,
/// in which the kernel becomes `α_{0,(1,ℓ)} = 2^{−ℓ}`,
/// `α_{(k,ℓ),(k+1,ℓ)} = 2` for every `ρ` (a diagonal similarity commutes
/// with point sweeps).  Masses are `Σ ρ_k u_{(k,ℓ)}`, evaluated exactly.
pub fn run_adversarial_tree(rho: &Sequence, stages: usize, max_depth: usize) -> Result<AdversarialRun> {
    let depths = (1..=stages)
        .map(|r| adversarial_stage_depth(rho, r, max_depth))
        .collect::<Result<Vec<_>>>()?;
    let tree_depth = depths.last().copied().unwrap_or(1).max(1);
    let one = Dyadic::one();
    let two = Dyadic::from_int(2);
    let row = |x: usize| -> Vec<(usize, Dyadic)> {
        match TreeSite::from_index(x) {
            TreeSite::Root => (1..=tree_depth)
                .map(|l| (TreeSite::Node(1, l).index(), Dyadic::pow2_neg(l as u32)))
                .collect(),
            TreeSite::Node(k, l) if k < l => vec![(TreeSite::Node(k + 1, l).index(), two.clone())],
            TreeSite::Node(..) => Vec::new(),
        }
    };
    let rho_d = |k: usize| -> Result<Dyadic> { Dyadic::from_f64(rho.get(k)?) };
    let mut dirt = SparseDirt::new([(0usize, one.clone())]);
    let summit_mass = |d: &SparseDirt<Dyadic>| -> Result<Dyadic> {
        let mut total = Dyadic::zero();
        for l in 1..=tree_depth {
            let u = d.get(TreeSite::Node(l, l).index());
            if !u.is_zero() {
                total = total.add(&rho_d(l)?.mul(&u));
            }
        }
        Ok(total)
    };
    dirt.sweep(0, &one, row);
    let mut steps = 1;
    let mut records = Vec::new();
    for (r, &l) in depths.iter().enumerate() {
        for s in non_summit_sweep(l) {
            dirt.sweep(s.index(), &one, row);
        }
        steps += l * (l - 1) / 2;
        let after_a = summit_mass(&dirt)?;
        let steps_after_a = steps;
        for s in summit_sweep(r + 1) {
            dirt.sweep(s.index(), &one, row);
        }
        steps += r + 1;
        let after_b = summit_mass(&dirt)?;
        let target = Dyadic::from_int(10i64.pow(r as u32 + 1));
        records.push(AdversarialStage {
            stage: r + 1,
            depth: l,
            steps_after_a,
            steps_after_b: steps,
            summit_mass_after_a: after_a.to_f64(),
            summit_mass_after_a_exact: after_a.to_string(),
            summit_mass_after_b: after_b.to_f64(),
            summit_mass_after_b_exact: after_b.to_string(),
            target: target.to_f64(),
            reached: target <= after_a && target <= after_b,
        });
    }
    Ok(AdversarialRun {
        stages: records,
        tree_depth,
        tree_sites: TreeSite::count(tree_depth),
        peak_charged: dirt.peak_charged(),
        steps,
    })
}

/// `γ_{kℓ} = min(σ_ℓ, ½(ρ_k − Σ_{k≤ℓ'<ℓ} γ_{kℓ'}))` for `1 ≤ k ≤ ℓ ≤ depth`,
/// with the remainders `ρ_k − Σ_{ℓ≤depth} γ_{kℓ}` (the mass of the
/// branches beyond the truncation).
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTable {
    depth: usize,
    rows: Vec<Vec<f64>>,
    remainders: Vec<f64>,
}

impl GammaTable {
    /// Builds the table.
    pub fn new(rho: &Sequence, sigma: &Sequence, depth: usize) -> Result<Self> {
        let mut rows = Vec::with_capacity(depth);
        let mut remainders = Vec::with_capacity(depth);
        for k in 1..=depth {
            let mut left = rho.get(k)?;
            let mut row = Vec::with_capacity(depth - k + 1);
            for l in k..=depth {
                let g = sigma.get(l - 1)?.min(0.5 * left);
                row.push(g);
                left -= g;
            }
            rows.push(row);
            remainders.push(left);
        }
        Ok(Self { depth, rows, remainders })
    }

    /// `γ_{kℓ}`.
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.rows[k - 1][l - k]
    }

    /// `ρ_k − Σ_{ℓ≤depth} γ_{kℓ}`.
    pub fn remainder(&self, k: usize) -> f64 {
        self.remainders[k - 1]
    }

    /// `Σ_{ℓ' ≥ from} γ_{1ℓ'}`, the part beyond the truncation included.
    pub fn first_row_tail(&self, from: usize) -> f64 {
        let tracked: f64 = (from.max(1)..=self.depth).rev().map(|l| self.get(1, l)).sum();
        tracked + self.remainder(1)
    }
}

/// `σ`: `"harmonic"` (`σ_ℓ = 1/ℓ`) or an explicit list `σ_1, σ_2, …`.
fn sigma_param(params: &mut Params, depth: usize) -> Result<Sequence> {
    let s = params.string("sigma", "harmonic");
    if s == "harmonic" {
        Sequence::parse((1..=depth + 1).map(|l| 1.0 / l as f64).collect(), "sigma")
    } else {
        let vals: Result<Vec<f64>> = s
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| Error::Parse(format!("sigma: `{v}` is not a number"))))
            .collect();
        Sequence::parse(vals?, "sigma")
    }
}

/// The `γ`-weighted tree: `α_{0,(1,ℓ)} = γ_{1ℓ}/ρ_0`,
/// `α_{(k,ℓ),(k+1,ℓ)} = γ_{k+1,ℓ}/γ_{kℓ}`, `c = ρ_0 δ_0`, `w ≡ 1`, with
/// the branch-by-branch order `0, (1,1), (1,2), (2,2), …`.
pub fn good_sweep_tree(params: &mut Params) -> Result<GalleryInstance> {
    let rho = rho_param(params)?;
    let depth = params.usize("depth", 40)?;
    let sigma = sigma_param(params, depth)?;
    if depth == 0 {
        return Err(Error::contract("good_sweep_tree needs depth ≥ 1"));
    }
    let kernel = good_sweep_kernel(&rho, &GammaTable::new(&rho, &sigma, depth)?, depth)?;
    let space = kernel.space().clone();
    let (order, _) = branchwise_order(depth);
    let mut inst = Instance::new(kernel);
    let mut c = vec![0.0; space.len()];
    c[0] = rho.get(0)?;
    inst.c = Some(DirtVector::new(&space, c)?);
    inst.w = Some(WeightVector::ones(&space));
    inst.profiles = point_profiles(&space, &order);
    Ok(GalleryInstance::new(
        "good_sweep_tree",
        inst,
        format!(
            "branches ℓ > {depth} are dropped; their mass Σ_{{ℓ>{depth}}} γ_{{1ℓ}} = ρ_1 − Σ_{{ℓ≤{depth}}} γ_{{1ℓ}} \
             never moves under the order and is added back analytically"
        ),
    ))
}

fn good_sweep_kernel(rho: &Sequence, gamma: &GammaTable, depth: usize) -> Result<Kernel> {
    let space = tree_space(depth)?;
    let r0 = rho.get(0)?;
    let mut entries = Vec::new();
    for l in 1..=depth {
        entries.push((0, TreeSite::Node(1, l).index(), gamma.get(1, l) / r0));
        for k in 1..l {
            entries.push((
                TreeSite::Node(k, l).index(),
                TreeSite::Node(k + 1, l).index(),
                gamma.get(k + 1, l) / gamma.get(k, l),
            ));
        }
    }
    Kernel::new(&space, entries)
}

/// Dirt after each completed branch of the good order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodSweepStage {
    /// Branch `ℓ` whose summit was just swept (`0`: only the root swept).
    pub stage: usize,
    /// Sweeps performed.
    pub steps: usize,
    /// Dirt on the tracked tree.
    pub tracked_dirt: f64,
    /// Dirt on branches beyond the truncation.
    pub untracked_dirt: f64,
    /// `tracked_dirt + untracked_dirt`.
    pub total_dirt: f64,
    /// `σ_{ℓ+1} + Σ_{ℓ'≥ℓ+2} γ_{1ℓ'}`.
    pub bound: f64,
}

/// Output of [`run_good_sweep_tree`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodSweepRun {
    /// One record per stage `0..=depth`.
    pub stages: Vec<GoodSweepStage>,
    /// The bound held at every step.
    pub bound_held: bool,
    /// Smallest `bound − total_dirt` over all steps.
    pub min_bound_slack: f64,
}

/// Sweeps the good order through branch `depth` and checks, at every step
/// between the sweeps of `(ℓ,ℓ)` and `(ℓ+1,ℓ+1)`, that the total dirt is
/// at most `σ_{ℓ+1} + Σ_{ℓ'≥ℓ+2} γ_{1ℓ'}`.
pub fn run_good_sweep_tree(params: &mut Params) -> Result<GoodSweepRun> {
    let rho = rho_param(params)?;
    let depth = params.usize("depth", 40)?;
    let sigma = sigma_param(params, depth)?;
    let gamma = GammaTable::new(&rho, &sigma, depth)?;
    let kernel = good_sweep_kernel(&rho, &gamma, depth)?;
    let mut dirt = SparseDirt::new([(0usize, rho.get(0)?)]);
    let (order, summits) = branchwise_order(depth);
    let untracked = gamma.remainder(1);
    let bound_for = |stage: usize| -> Result<f64> { Ok(sigma.get(stage)? + gamma.first_row_tail(stage + 2)) };
    let mut stages = Vec::new();
    let mut stage = 0;
    let mut min_slack = f64::INFINITY;
    for (n, site) in order.iter().enumerate() {
        dirt.sweep(site.index(), &1.0, |x| kernel.row(x).to_vec());
        let steps = n + 1;
        if summits.get(stage) == Some(&steps) {
            stage += 1;
        }
        let tracked = dirt.total_where(|_| true);
        let total = tracked + untracked;
        let bound = bound_for(stage)?;
        min_slack = min_slack.min(bound - total);
        let stage_done = steps == 1 || summits.get(stage.wrapping_sub(1)) == Some(&steps);
        if stage_done {
            stages.push(GoodSweepStage {
                stage,
                steps,
                tracked_dirt: tracked,
                untracked_dirt: untracked,
                total_dirt: total,
                bound,
            });
        }
    }
    Ok(GoodSweepRun { stages, bound_held: min_slack >= -1e-12, min_bound_slack: min_slack })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adversarial_moments_on_truncation() {
        let g = adversarial_tree(&mut Params::parse(&["depth=8"]).unwrap()).unwrap();
        let k = &g.instance.kernel;
        let mut row = g.instance.c.as_ref().unwrap().values().to_vec();
        for step in 1..=8usize {
            row = k.left_apply(&row);
            let total: f64 = row.iter().sum();
            // ρ ≡ 1: Σ_{ℓ=k}^{8} 2^-(ℓ-k+1) = 1 − 2^-(9-k).
            assert!((total - (1.0 - 2f64.powi(-(9 - step as i32)))).abs() < 1e-15);
        }
    }

    #[test]
    fn stage_depths_for_unit_rho() {
        let rho = Sequence::Constant(1.0);
        assert_eq!(adversarial_stage_depth(&rho, 1, 10_000).unwrap(), 21);
        assert_eq!(adversarial_stage_depth(&rho, 2, 10_000).unwrap(), 202);
    }

    #[test]
    fn adversarial_two_stages() {
        let run = run_adversarial_tree(&Sequence::Constant(1.0), 2, 10_000).unwrap();
        assert_eq!(run.stages[0].summit_mass_after_a_exact, "21/2^1");
        assert_eq!(run.stages[0].summit_mass_after_b, 10.0);
        assert_eq!(run.stages[1].summit_mass_after_b, 100.0);
        assert!(run.stages.iter().all(|s| s.reached));
    }

    #[test]
    fn good_sweep_small() {
        let run = run_good_sweep_tree(&mut Params::parse(&["depth=12"]).unwrap()).unwrap();
        assert!(run.bound_held);
        assert_eq!(run.stages.len(), 13);
        // After branch ℓ is done, only Σ_{ℓ'>ℓ} γ_{1ℓ'} = 2^-ℓ remains (ρ ≡ 1).
        let last = run.stages.last().unwrap();
        assert!((last.total_dirt - 2f64.powi(-12)).abs() < 1e-15);
    }
}

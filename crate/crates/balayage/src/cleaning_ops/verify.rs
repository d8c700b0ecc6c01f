//! Executable verifiers for the algebraic identities and the order
//! inequalities satisfied by cleaning operators.
//!
//! Every verifier materializes both sides as dense matrices (or vectors)
//! and reports the worst entrywise discrepancy.  With
//! `scale = max(1, largest absolute entry on either side)`:
//!
//! * an identity passes iff `max_residual ≤ 1e-10 · scale`;
//! * an inequality passes iff `min_slack ≥ −1e-10 · scale`.
//!
//! Support and range preconditions are checked up front and reported as
//! contract errors naming the violated condition.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dense::{self, balayage_exact, beta, beta_product, beta_star_product, diag, geometric_series, indicator};
use crate::digest::digest_debug;
use crate::error::{Error, Result};
use crate::kernel_core::{is_subinvariant, DirtVector, Kernel, Profile, SiteSet, WeightVector};

/// Relative tolerance of every verifier.
pub const VERIFY_REL_TOL: f64 = 1e-10;

/// Names of the identity verifiers, in canonical order.
pub const IDENTITY_NAMES: [&str; 9] = [
    "intertwining_I",
    "intertwining_II",
    "comparison",
    "collapse",
    "telescoping",
    "restricted_support",
    "pi_properties",
    "convergence_to_balayage",
    "geometric_identity",
];

/// Names of the inequality verifiers, in canonical order.
pub const INEQUALITY_NAMES: [&str; 13] = [
    "flow_positivity",
    "multi_monotonicity",
    "collapse_inequality",
    "block_collapse",
    "reverse_flow",
    "reverse_multi_monotonicity",
    "reverse_collapse",
    "reverse_block_collapse",
    "balayage_comparison",
    "cleaner_comparison",
    "geometric_inequality",
    "geometric_reverse",
    "betastar_sum",
];

/// One identity to verify, with its inputs.
#[derive(Debug, Clone)]
pub enum IdentityCheck {
    /// `(I−α) β_h = β*_h (I−α)`.
    IntertwiningI {
        /// Profile `h`.
        h: Profile,
    },
    /// `(β_{h1} − I) I_{h2} = I_{h1} (β*_{h2} − I)` and `β_h I_h = I_h β*_h`.
    IntertwiningII {
        /// Profile `h1`.
        h1: Profile,
        /// Profile `h2`.
        h2: Profile,
    },
    /// `β_{h1} − β_{h2} = I_{h2−h1} (I−α)`.
    Comparison {
        /// Profile `h1`.
        h1: Profile,
        /// Profile `h2`.
        h2: Profile,
    },
    /// `β_{h1} β_{h2} = β_{1−(1−h1)(1−h2)} − I_{h1} α I_{h2} (I−α)`.
    Collapse {
        /// Profile `h1`.
        h1: Profile,
        /// Profile `h2`.
        h2: Profile,
    },
    /// Both telescoping expansions of `β_{g_1}⋯β_{g_n} − β_{h_1}⋯β_{h_n}`.
    Telescoping {
        /// Profiles `g_i`.
        g: Vec<Profile>,
        /// Profiles `h_i` (same length).
        h: Vec<Profile>,
    },
    /// Products of cleaners supported in `Λ`: insertion of `I_{h_i}`
    /// (any real `h_i ≡ 1` on `Λ`) and `I_{Λ^c} β⋯β = I_{Λ^c} = β*⋯β* I_{Λ^c}`.
    RestrictedSupport {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profiles `g_i` supported in `Λ`.
        g: Vec<Profile>,
        /// Real functions `h_i` equal to 1 on `Λ` (same length as `g`).
        h: Vec<Vec<f64>>,
    },
    /// `Π² = Π`, `I_Λ(I−Π) = I−Π`, `I_h Π = I_h α Π`, `β_h Π = Π`,
    /// `Π β_h = Π` for `supp h ⊆ Λ`.
    PiProperties {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profile `h` supported in `Λ`.
        h: Profile,
    },
    /// `β_{h_1}⋯β_{h_n} − Π = β⋯β I_Λ (I−Π) = (I_Λ β_{h_1} I_Λ)⋯(I_Λ β_{h_n} I_Λ) I_Λ (I−Π)`.
    ConvergenceToBalayage {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profiles `h_i` supported in `Λ`.
        h: Vec<Profile>,
    },
    /// `Σ_N (I_Λ β_h I_Λ)^N I_h = Σ_k (I_Λ α I_Λ)^k I_Λ` for `supp h = Λ`.
    GeometricIdentity {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profile `h` with support exactly `Λ`.
        h: Profile,
    },
}

impl IdentityCheck {
    /// Canonical name of the identity.
    pub fn name(&self) -> &'static str {
        match self {
            IdentityCheck::IntertwiningI { .. } => IDENTITY_NAMES[0],
            IdentityCheck::IntertwiningII { .. } => IDENTITY_NAMES[1],
            IdentityCheck::Comparison { .. } => IDENTITY_NAMES[2],
            IdentityCheck::Collapse { .. } => IDENTITY_NAMES[3],
            IdentityCheck::Telescoping { .. } => IDENTITY_NAMES[4],
            IdentityCheck::RestrictedSupport { .. } => IDENTITY_NAMES[5],
            IdentityCheck::PiProperties { .. } => IDENTITY_NAMES[6],
            IdentityCheck::ConvergenceToBalayage { .. } => IDENTITY_NAMES[7],
            IdentityCheck::GeometricIdentity { .. } => IDENTITY_NAMES[8],
        }
    }
}

/// Outcome of an identity verifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    /// Identity name.
    pub name: String,
    /// Digest of the kernel and inputs.
    pub instance_digest: String,
    /// Largest absolute entrywise difference between the two sides.
    pub max_residual: f64,
    /// `max(1, largest absolute entry on either side)`.
    pub scale: f64,
    /// `max_residual ≤ 1e-10 · scale`.
    pub pass: bool,
}

/// One inequality to verify, with its inputs.
#[derive(Debug, Clone)]
pub enum InequalityCheck {
    /// `I_Λ(I−α) I_f w ≥ 0` and `I_Λ(I−α) β_{h_1}⋯β_{h_n} I_f w ≥ 0`
    /// for `χ_Λ ≤ f ≤ 1`, `0 ≤ h_i ≤ χ_Λ`.  Needs a subinvariant `w`.
    FlowPositivity {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profile `f ≥ χ_Λ`.
        f: Profile,
        /// Profiles `h_i ≤ χ_Λ`.
        h: Vec<Profile>,
    },
    /// `β_{h_1}⋯β_{h_n} I_f w ≤ β_{g_1}⋯β_{g_n} I_f w` for
    /// `0 ≤ g_i ≤ h_i ≤ χ_Λ ≤ f ≤ 1`.  Needs a subinvariant `w`.
    MultiMonotonicity {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profile `f ≥ χ_Λ`.
        f: Profile,
        /// Weaker profiles `g_i`.
        g: Vec<Profile>,
        /// Stronger profiles `h_i`.
        h: Vec<Profile>,
    },
    /// `β_{g_1}⋯β_{g_n} β_{h_1}⋯β_{h_m} I_f w ≤ β_{1−Π(1−g_i)} β_{h_1}⋯β_{h_m} I_f w`.
    /// Needs a subinvariant `w`.
    CollapseInequality {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profile `f ≥ χ_Λ`.
        f: Profile,
        /// Profiles collapsed into one.
        g: Vec<Profile>,
        /// Trailing profiles.
        h: Vec<Profile>,
    },
    /// `β_{h_1}⋯β_{h_N} I_f w ≤ β_{g_1}⋯β_{g_k} I_f w` when consecutive
    /// blocks `(n_{j−1}, n_j]` of the `h_i` collapse to at least `g_j`.
    /// Needs a subinvariant `w`.
    BlockCollapse {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profile `f ≥ χ_Λ`.
        f: Profile,
        /// The `N` profiles `h_i`.
        h: Vec<Profile>,
        /// The `k` profiles `g_j`.
        g: Vec<Profile>,
        /// Block boundaries `0 ≤ n_0 < n_1 < … < n_k ≤ N`.
        breaks: Vec<usize>,
    },
    /// `I_Λ(I−α) I_{Λ^c} ≤ 0` and `I_Λ(I−α) β_{h_1}⋯β_{h_n} I_{Λ^c} ≤ 0`.
    ReverseFlow {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profiles `h_i ≤ χ_Λ`.
        h: Vec<Profile>,
    },
    /// `β_{g_1}⋯β_{g_n} I_{Λ^c} ≥ β_{h_1}⋯β_{h_n} I_{Λ^c}` for `h_i ≤ g_i ≤ χ_Λ`.
    ReverseMultiMonotonicity {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Stronger profiles `g_i`.
        g: Vec<Profile>,
        /// Weaker profiles `h_i`.
        h: Vec<Profile>,
    },
    /// `β_g⋯β_h⋯ I_{Λ^c} ≥ β_{1−Π(1−g_i)} β_h⋯ I_{Λ^c}`.
    ReverseCollapse {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profiles collapsed into one.
        g: Vec<Profile>,
        /// Trailing profiles.
        h: Vec<Profile>,
    },
    /// `β_{h_1}⋯β_{h_N} I_{Λ^c} ≥ β_{g_1}⋯β_{g_k} I_{Λ^c}` under the block condition.
    ReverseBlockCollapse {
        /// Region `Λ`.
        lambda: SiteSet,
        /// The `N` profiles `h_i`.
        h: Vec<Profile>,
        /// The `k` profiles `g_j`.
        g: Vec<Profile>,
        /// Block boundaries `0 ≤ n_0 < n_1 < … < n_k ≤ N`.
        breaks: Vec<usize>,
    },
    /// Comparison of `A = β_{h_1}⋯β_{h_n}` (absorbed by `Π`) with `Π`:
    /// `0 ≤ Πw ≤ Aw`, the decomposition of `A − Π`, and the norm bounds
    /// `‖A−Π‖ ≤ 2‖A I_Λ‖`, `‖c(A−Π)‖ = ‖cAI_Λ‖ + ‖c(Π−AI_{Λ^c})‖ ≤ 2‖cAI_Λ‖`.
    /// Needs a subinvariant `w`.
    BalayageComparison {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profiles supported in `Λ`.
        h: Vec<Profile>,
        /// Dirt vector `c ≥ 0`.
        c: DirtVector,
    },
    /// For `g_i ≤ h_i ≤ χ_Λ`: `‖β_h⋯ − Π‖ ≤ ‖β_g⋯ − Π‖` in operator and
    /// dirt norms, and the same with the `h_i` collapsed over the blocks
    /// `(n_{j−1}, n_j]` on the right.  Needs a subinvariant `w`.
    CleanerComparison {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Weaker profiles `g_i`.
        g: Vec<Profile>,
        /// Stronger profiles `h_i`.
        h: Vec<Profile>,
        /// Block ends `0 ≤ n_1 ≤ … ≤ n_k ≤ N` for the collapsed form.
        breaks: Vec<usize>,
        /// Dirt vector `c ≥ 0`.
        c: DirtVector,
    },
    /// `Σ_k (I_Λ B I_Λ)^k I_h ≤ Σ_k (I_Λ α I_Λ)^k I_Λ` with
    /// `B = β_{f_1}⋯β_{f_m}` and `h = 1 − Π(1−f_i)`.  When either series
    /// diverges, the partial-sum form `Σ_{k<K} (I_Λ B I_Λ)^k I_h ≤
    /// Σ_{j≤(K−1)m} (I_Λ α I_Λ)^j I_Λ` is checked instead.
    GeometricInequality {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profiles `f_i` supported in `Λ`.
        f: Vec<Profile>,
    },
    /// `Σ_k (I_Λ α I_Λ)^k ≤ (Σ_n (I_Λ B I_Λ)^n)(Σ_{k<m} (I_Λ α I_Λ)^k)`,
    /// provided the middle series converges.
    GeometricReverse {
        /// Region `Λ`.
        lambda: SiteSet,
        /// Profiles `f_i` supported in `Λ`.
        f: Vec<Profile>,
    },
    /// `0 ≤ Σ_i I_{f_i} β*_{f_{i+1}}⋯β*_{f_m} ≤ Σ_{k<m} α^k`, together with
    /// `I − β_{f_1}⋯β_{f_m} = (Σ_i I_{f_i} β*_{f_{i+1}}⋯β*_{f_m})(I − α)`.
    BetaStarSum {
        /// Profiles `f_i`.
        f: Vec<Profile>,
    },
}

impl InequalityCheck {
    /// Canonical name of the inequality.
    pub fn name(&self) -> &'static str {
        use InequalityCheck::*;
        match self {
            FlowPositivity { .. } => INEQUALITY_NAMES[0],
            MultiMonotonicity { .. } => INEQUALITY_NAMES[1],
            CollapseInequality { .. } => INEQUALITY_NAMES[2],
            BlockCollapse { .. } => INEQUALITY_NAMES[3],
            ReverseFlow { .. } => INEQUALITY_NAMES[4],
            ReverseMultiMonotonicity { .. } => INEQUALITY_NAMES[5],
            ReverseCollapse { .. } => INEQUALITY_NAMES[6],
            ReverseBlockCollapse { .. } => INEQUALITY_NAMES[7],
            BalayageComparison { .. } => INEQUALITY_NAMES[8],
            CleanerComparison { .. } => INEQUALITY_NAMES[9],
            GeometricInequality { .. } => INEQUALITY_NAMES[10],
            GeometricReverse { .. } => INEQUALITY_NAMES[11],
            BetaStarSum { .. } => INEQUALITY_NAMES[12],
        }
    }

    /// `true` when the statement needs a positive subinvariant weight.
    pub fn needs_subinvariant_weight(&self) -> bool {
        use InequalityCheck::*;
        matches!(
            self,
            FlowPositivity { .. }
                | MultiMonotonicity { .. }
                | CollapseInequality { .. }
                | BlockCollapse { .. }
                | BalayageComparison { .. }
                | CleanerComparison { .. }
        )
    }
}

/// Outcome of an inequality verifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    /// Inequality name.
    pub name: String,
    /// Digest of the kernel, weight and inputs.
    pub instance_digest: String,
    /// Smallest entrywise slack (larger side minus smaller side).
    pub min_slack: f64,
    /// `max(1, largest absolute entry on either side)`.
    pub scale: f64,
    /// `min_slack ≥ −1e-10 · scale`.
    pub pass: bool,
    /// Which form was checked, for verifiers with more than one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

/// Accumulates residuals or slacks over several sub-statements.
struct Tally {
    residual: f64,
    slack: f64,
    scale: f64,
}

impl Tally {
    fn new() -> Self {
        Self { residual: 0.0, slack: f64::INFINITY, scale: 1.0 }
    }

    fn see(&mut self, v: &[f64]) {
        self.scale = v.iter().fold(self.scale, |m, x| m.max(x.abs()));
    }

    /// Records the identity `lhs = rhs`.
    fn eq(&mut self, lhs: &[f64], rhs: &[f64]) {
        self.see(lhs);
        self.see(rhs);
        let r = lhs.iter().zip(rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        self.residual = self.residual.max(r);
        self.slack = self.slack.min(-r);
    }

    /// Records the inequality `small ≤ large` entrywise.
    fn le(&mut self, small: &[f64], large: &[f64]) {
        self.see(small);
        self.see(large);
        let s = small.iter().zip(large).fold(f64::INFINITY, |m, (a, b)| m.min(b - a));
        self.slack = self.slack.min(s);
    }

    /// Records the scalar inequality `small ≤ large`.
    fn le_scalar(&mut self, small: f64, large: f64) {
        self.le(&[small], &[large]);
    }

    fn identity_report(self, name: &str, digest: String) -> IdentityReport {
        IdentityReport {
            name: name.to_string(),
            instance_digest: digest,
            max_residual: self.residual,
            scale: self.scale,
            pass: self.residual <= VERIFY_REL_TOL * self.scale,
        }
    }

    fn inequality_report(self, name: &str, digest: String, mode: Option<String>) -> InequalityReport {
        let slack = if self.slack.is_finite() { self.slack } else { 0.0 };
        InequalityReport {
            name: name.to_string(),
            instance_digest: digest,
            min_slack: slack,
            scale: self.scale,
            pass: slack >= -VERIFY_REL_TOL * self.scale,
            mode,
        }
    }
}

fn same_space(alpha: &Kernel, p: &Profile) -> Result<()> {
    alpha.space().ensure_same(p.space(), "profile")
}

fn require_supported(ps: &[Profile], lambda: &SiteSet, what: &str) -> Result<()> {
    for (i, p) in ps.iter().enumerate() {
        if !p.is_supported_in(lambda) {
            return Err(Error::contract(format!("support of {what}[{i}] is not contained in Λ")));
        }
    }
    Ok(())
}

fn require_dominates_lambda(f: &Profile, lambda: &SiteSet) -> Result<()> {
    if lambda.iter().any(|x| f.get(x) != 1.0) {
        return Err(Error::contract("f must equal 1 on Λ (χ_Λ ≤ f ≤ 1)"));
    }
    Ok(())
}

fn require_pointwise_le(small: &[Profile], large: &[Profile], what: &str) -> Result<()> {
    if small.len() != large.len() {
        return Err(Error::contract(format!("{what}: profile lists have different lengths")));
    }
    for (i, (a, b)) in small.iter().zip(large).enumerate() {
        if !a.le(b) {
            return Err(Error::contract(format!("{what}: ordering fails at position {i}")));
        }
    }
    Ok(())
}

fn refs(ps: &[Profile]) -> Vec<&Profile> {
    ps.iter().collect()
}

fn lambda_c(lambda: &SiteSet) -> SiteSet {
    lambda.complement()
}

/// `true` iff every consecutive block of `h` (between `breaks`) collapses
/// to at least the matching `g_j`.
fn block_condition(h: &[Profile], g: &[Profile], breaks: &[usize], space_len: usize) -> Result<()> {
    if breaks.len() != g.len() + 1 {
        return Err(Error::contract("block boundaries must number one more than the g profiles"));
    }
    if breaks.windows(2).any(|w| w[0] >= w[1]) || breaks.last().copied().unwrap_or(0) > h.len() {
        return Err(Error::contract("block boundaries must satisfy n_0 < n_1 < … < n_k ≤ N"));
    }
    for (j, gj) in g.iter().enumerate() {
        let block = &h[breaks[j]..breaks[j + 1]];
        let c = collapse_values(block, space_len);
        if c.iter().zip(gj.values()).any(|(a, b)| *a < *b - 1e-12) {
            return Err(Error::contract(format!("block {j} does not collapse to at least g[{j}]")));
        }
    }
    Ok(())
}

fn collapse_values(ps: &[Profile], n: usize) -> Vec<f64> {
    let mut keep = vec![1.0; n];
    for p in ps {
        for (k, v) in keep.iter_mut().zip(p.values()) {
            *k *= 1.0 - v;
        }
    }
    keep.into_iter().map(|k| 1.0 - k).collect()
}

fn collapse_profile(ps: &[Profile], alpha: &Kernel) -> Profile {
    Profile::collapse(alpha.space(), ps.iter())
}

fn col(m: &DMatrix<f64>) -> Vec<f64> {
    m.as_slice().to_vec()
}

fn times_w(m: &DMatrix<f64>, w: &[f64]) -> Vec<f64> {
    (m * nalgebra::DVector::from_column_slice(w)).as_slice().to_vec()
}

/// Runs one identity verifier.
pub fn verify_identity(alpha: &Kernel, check: &IdentityCheck) -> Result<IdentityReport> {
    let a = dense::kernel_dense(alpha)?;
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let i_minus_a = &id - &a;
    let digest = digest_debug(&(alpha.entries().collect::<Vec<_>>(), check));
    let mut t = Tally::new();
    match check {
        IdentityCheck::IntertwiningI { h } => {
            same_space(alpha, h)?;
            let lhs = &i_minus_a * beta(&a, h.values());
            let rhs = dense::beta_star(&a, h.values()) * &i_minus_a;
            t.eq(lhs.as_slice(), rhs.as_slice());
        }
        IdentityCheck::IntertwiningII { h1, h2 } => {
            same_space(alpha, h1)?;
            same_space(alpha, h2)?;
            let lhs = (beta(&a, h1.values()) - &id) * diag(h2.values());
            let rhs = diag(h1.values()) * (dense::beta_star(&a, h2.values()) - &id);
            t.eq(lhs.as_slice(), rhs.as_slice());
            let lhs = beta(&a, h1.values()) * diag(h1.values());
            let rhs = diag(h1.values()) * dense::beta_star(&a, h1.values());
            t.eq(lhs.as_slice(), rhs.as_slice());
        }
        IdentityCheck::Comparison { h1, h2 } => {
            same_space(alpha, h1)?;
            same_space(alpha, h2)?;
            let lhs = beta(&a, h1.values()) - beta(&a, h2.values());
            let d: Vec<f64> = h2.values().iter().zip(h1.values()).map(|(x, y)| x - y).collect();
            let rhs = diag(&d) * &i_minus_a;
            t.eq(lhs.as_slice(), rhs.as_slice());
        }
        IdentityCheck::Collapse { h1, h2 } => {
            same_space(alpha, h1)?;
            same_space(alpha, h2)?;
            let lhs = beta(&a, h1.values()) * beta(&a, h2.values());
            let hc = collapse_values(&[h1.clone(), h2.clone()], n);
            let rhs = beta(&a, &hc) - diag(h1.values()) * &a * diag(h2.values()) * &i_minus_a;
            t.eq(lhs.as_slice(), rhs.as_slice());
        }
        IdentityCheck::Telescoping { g, h } => {
            if g.len() != h.len() {
                return Err(Error::contract("telescoping: g and h must have the same length"));
            }
            for p in g.iter().chain(h) {
                same_space(alpha, p)?;
            }
            let lhs = beta_product(&a, &refs(g)) - beta_product(&a, &refs(h));
            let mut rhs1 = DMatrix::zeros(n, n);
            let mut rhs2 = DMatrix::zeros(n, n);
            for i in 0..g.len() {
                let left = beta_product(&a, &refs(&g[..i]));
                let d: Vec<f64> = h[i].values().iter().zip(g[i].values()).map(|(x, y)| x - y).collect();
                let mid = diag(&d);
                rhs1 += &left * &mid * &i_minus_a * beta_product(&a, &refs(&h[i + 1..]));
                rhs2 += &left * &mid * beta_star_product(&a, &refs(&h[i + 1..])) * &i_minus_a;
            }
            t.eq(lhs.as_slice(), rhs1.as_slice());
            t.eq(lhs.as_slice(), rhs2.as_slice());
        }
        IdentityCheck::RestrictedSupport { lambda, g, h } => {
            alpha.space().ensure_same(lambda.space(), "region")?;
            if g.len() != h.len() {
                return Err(Error::contract("restricted_support: g and h must have the same length"));
            }
            require_supported(g, lambda, "g")?;
            for (i, hi) in h.iter().enumerate() {
                if hi.len() != n {
                    return Err(Error::dimension("restricted_support: h has the wrong length"));
                }
                if lambda.iter().any(|x| hi[x] != 1.0) {
                    return Err(Error::contract(format!("h[{i}] must equal 1 on Λ")));
                }
            }
            let il = indicator(lambda);
            let ilc = indicator(&lambda_c(lambda));
            let bg = beta_product(&a, &refs(g));
            let bsg = beta_star_product(&a, &refs(g));
            let lhs1 = &bg * &il;
            let mut rhs1 = id.clone();
            let mut rhs2 = il.clone();
            for (gi, hi) in g.iter().zip(h) {
                rhs1 = rhs1 * diag(hi) * beta(&a, gi.values());
                rhs2 = rhs2 * dense::beta_star(&a, gi.values()) * diag(hi);
            }
            let rhs1 = rhs1 * &il;
            t.eq(lhs1.as_slice(), rhs1.as_slice());
            let lhs2 = &il * &bsg;
            t.eq(lhs2.as_slice(), rhs2.as_slice());
            t.eq((&ilc * &bg).as_slice(), ilc.as_slice());
            t.eq((&bsg * &ilc).as_slice(), ilc.as_slice());
        }
        IdentityCheck::PiProperties { lambda, h } => {
            alpha.space().ensure_same(lambda.space(), "region")?;
            same_space(alpha, h)?;
            require_supported(std::slice::from_ref(h), lambda, "h")?;
            let pi = balayage_exact(alpha, lambda)?;
            let il = indicator(lambda);
            t.eq((&pi * &pi).as_slice(), pi.as_slice());
            let i_minus_pi = &id - &pi;
            t.eq((&il * &i_minus_pi).as_slice(), i_minus_pi.as_slice());
            let ih = diag(h.values());
            t.eq((&ih * &pi).as_slice(), (&ih * &a * &pi).as_slice());
            let bh = beta(&a, h.values());
            t.eq((&bh * &pi).as_slice(), pi.as_slice());
            t.eq((&pi * &bh).as_slice(), pi.as_slice());
        }
        IdentityCheck::ConvergenceToBalayage { lambda, h } => {
            alpha.space().ensure_same(lambda.space(), "region")?;
            require_supported(h, lambda, "h")?;
            let pi = balayage_exact(alpha, lambda)?;
            let il = indicator(lambda);
            let prod = beta_product(&a, &refs(h));
            let lhs = &prod - &pi;
            let tail = &il * (&id - &pi);
            let rhs1 = &prod * &tail;
            let rhs2 = h
                .iter()
                .fold(id.clone(), |acc, p| acc * (&il * beta(&a, p.values()) * &il))
                * &tail;
            t.eq(lhs.as_slice(), rhs1.as_slice());
            t.eq(lhs.as_slice(), rhs2.as_slice());
        }
        IdentityCheck::GeometricIdentity { lambda, h } => {
            alpha.space().ensure_same(lambda.space(), "region")?;
            same_space(alpha, h)?;
            if h.support() != *lambda {
                return Err(Error::contract("geometric_identity: the support of h must equal Λ"));
            }
            let il = indicator(lambda);
            let m1 = &il * beta(&a, h.values()) * &il;
            let q = &il * &a * &il;
            let (s1, t1) = geometric_series(&m1)?;
            let (s2, t2) = geometric_series(&q)?;
            let lhs = s1 * diag(h.values());
            let rhs = s2 * &il;
            t.eq(lhs.as_slice(), rhs.as_slice());
            // Neglected tails enter the residual as additional uncertainty.
            t.residual += t1 + t2;
        }
    }
    Ok(t.identity_report(check.name(), digest))
}

/// Runs one inequality verifier.  Statements that need a positive
/// subinvariant weight fail with a contract error when `w` is absent or
/// not subinvariant.
pub fn verify_inequality(
    alpha: &Kernel,
    w: Option<&WeightVector>,
    check: &InequalityCheck,
) -> Result<InequalityReport> {
    use InequalityCheck::*;
    let a = dense::kernel_dense(alpha)?;
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let i_minus_a = &id - &a;
    let wv: Vec<f64> = match w {
        Some(w) => {
            alpha.space().ensure_same(w.space(), "weight")?;
            w.values().to_vec()
        }
        None => vec![1.0; n],
    };
    if check.needs_subinvariant_weight() {
        let w = w.ok_or_else(|| {
            Error::contract(format!("{} needs a positive subinvariant weight w", check.name()))
        })?;
        if !is_subinvariant(alpha, w, VERIFY_REL_TOL)? {
            return Err(Error::contract(format!(
                "{}: the supplied weight is not subinvariant (αw ≤ w fails)",
                check.name()
            )));
        }
    }
    let digest = digest_debug(&(alpha.entries().collect::<Vec<_>>(), &wv, check));
    let mut t = Tally::new();
    let mut mode = None;
    match check {
        FlowPositivity { lambda, f, h } => {
            require_dominates_lambda(f, lambda)?;
            require_supported(h, lambda, "h")?;
            let il = indicator(lambda);
            let ifw = times_w(&diag(f.values()), &wv);
            let zero = vec![0.0; n];
            let v1 = times_w(&(&il * &i_minus_a), &ifw);
            t.le(&zero, &v1);
            let v2 = times_w(&(&il * &i_minus_a * beta_product(&a, &refs(h))), &ifw);
            t.le(&zero, &v2);
        }
        MultiMonotonicity { lambda, f, g, h } => {
            require_dominates_lambda(f, lambda)?;
            require_supported(h, lambda, "h")?;
            require_pointwise_le(g, h, "g ≤ h")?;
            let ifw = times_w(&diag(f.values()), &wv);
            let lhs = times_w(&beta_product(&a, &refs(h)), &ifw);
            let rhs = times_w(&beta_product(&a, &refs(g)), &ifw);
            t.le(&lhs, &rhs);
        }
        CollapseInequality { lambda, f, g, h } => {
            require_dominates_lambda(f, lambda)?;
            require_supported(g, lambda, "g")?;
            require_supported(h, lambda, "h")?;
            let ifw = times_w(&diag(f.values()), &wv);
            let tail = beta_product(&a, &refs(h));
            let lhs = times_w(&(beta_product(&a, &refs(g)) * &tail), &ifw);
            let rhs = times_w(&(beta(&a, &collapse_values(g, n)) * &tail), &ifw);
            t.le(&lhs, &rhs);
        }
        BlockCollapse { lambda, f, h, g, breaks } => {
            require_dominates_lambda(f, lambda)?;
            require_supported(h, lambda, "h")?;
            require_supported(g, lambda, "g")?;
            block_condition(h, g, breaks, n)?;
            let ifw = times_w(&diag(f.values()), &wv);
            let lhs = times_w(&beta_product(&a, &refs(h)), &ifw);
            let rhs = times_w(&beta_product(&a, &refs(g)), &ifw);
            t.le(&lhs, &rhs);
        }
        ReverseFlow { lambda, h } => {
            require_supported(h, lambda, "h")?;
            let il = indicator(lambda);
            let ilc = indicator(&lambda_c(lambda));
            let zero = vec![0.0; n * n];
            let m1 = &il * &i_minus_a * &ilc;
            t.le(m1.as_slice(), &zero);
            let m2 = &il * &i_minus_a * beta_product(&a, &refs(h)) * &ilc;
            t.le(m2.as_slice(), &zero);
        }
        ReverseMultiMonotonicity { lambda, g, h } => {
            require_supported(g, lambda, "g")?;
            require_pointwise_le(h, g, "h ≤ g")?;
            let ilc = indicator(&lambda_c(lambda));
            let large = beta_product(&a, &refs(g)) * &ilc;
            let small = beta_product(&a, &refs(h)) * &ilc;
            t.le(small.as_slice(), large.as_slice());
        }
        ReverseCollapse { lambda, g, h } => {
            require_supported(g, lambda, "g")?;
            require_supported(h, lambda, "h")?;
            let ilc = indicator(&lambda_c(lambda));
            let tail = beta_product(&a, &refs(h)) * &ilc;
            let large = beta_product(&a, &refs(g)) * &tail;
            let small = beta(&a, &collapse_values(g, n)) * &tail;
            t.le(small.as_slice(), large.as_slice());
        }
        ReverseBlockCollapse { lambda, h, g, breaks } => {
            require_supported(h, lambda, "h")?;
            require_supported(g, lambda, "g")?;
            block_condition(h, g, breaks, n)?;
            let ilc = indicator(&lambda_c(lambda));
            let large = beta_product(&a, &refs(h)) * &ilc;
            let small = beta_product(&a, &refs(g)) * &ilc;
            t.le(small.as_slice(), large.as_slice());
        }
        BalayageComparison { lambda, h, c } => {
            require_supported(h, lambda, "h")?;
            alpha.space().ensure_same(c.space(), "dirt")?;
            let pi = balayage_exact(alpha, lambda)?;
            let il = indicator(lambda);
            let ilc = indicator(&lambda_c(lambda));
            let am = beta_product(&a, &refs(h));
            // Absorption A Π = Π.
            t.eq((&am * &pi).as_slice(), pi.as_slice());
            let piw = times_w(&pi, &wv);
            t.le(&vec![0.0; n], &piw);
            t.le(&piw, &times_w(&am, &wv));
            let a_l = &am * &il;
            let gap = &pi - &am * &ilc;
            t.eq(gap.as_slice(), (&a_l * &pi).as_slice());
            t.eq((&am - &pi).as_slice(), (&a_l * (&id - &pi)).as_slice());
            t.le(&vec![0.0; n * n], gap.as_slice());
            t.le(&times_w(&gap, &wv), &times_w(&a_l, &wv));
            let wvec = WeightVector::new(alpha.space(), wv.clone())?;
            let norm = |m: &DMatrix<f64>| crate::kernel_core::weighted_operator_norm(m, &wvec);
            let dev = norm(&(&am - &pi))?;
            t.eq(&[dev], &[norm(&(&a_l * (&id - &pi)))?]);
            t.le_scalar(dev, 2.0 * norm(&a_l)?);
            let crow = nalgebra::RowDVector::from_row_slice(c.values());
            let wn = |v: &nalgebra::RowDVector<f64>| crate::kernel_core::wnorm(v.as_slice(), &wv);
            let cdev = wn(&(&crow * (&am - &pi)));
            let cal = wn(&(&crow * &a_l));
            t.eq(&[cdev], &[cal + wn(&(&crow * &gap))]);
            t.le_scalar(cdev, 2.0 * cal);
        }
        CleanerComparison { lambda, g, h, breaks, c } => {
            require_supported(h, lambda, "h")?;
            require_pointwise_le(g, h, "g ≤ h")?;
            alpha.space().ensure_same(c.space(), "dirt")?;
            if breaks.windows(2).any(|w| w[0] > w[1]) || breaks.last().copied().unwrap_or(0) > h.len() {
                return Err(Error::contract("block ends must satisfy 0 ≤ n_1 ≤ … ≤ n_k ≤ N"));
            }
            let pi = balayage_exact(alpha, lambda)?;
            let il = indicator(lambda);
            let ilc = indicator(&lambda_c(lambda));
            let wvec = WeightVector::new(alpha.space(), wv.clone())?;
            let norm = |m: &DMatrix<f64>| crate::kernel_core::weighted_operator_norm(m, &wvec);
            let crow = nalgebra::RowDVector::from_row_slice(c.values());
            let cnorm = |m: &DMatrix<f64>| crate::kernel_core::wnorm((&crow * m).as_slice(), &wv);
            let ah = beta_product(&a, &refs(h));
            let bg = beta_product(&a, &refs(g));
            // Hypotheses of the general comparison, for A = β_h⋯, B = β_g⋯.
            t.le(&times_w(&(&ah * &il), &wv), &times_w(&(&bg * &il), &wv));
            t.le(&times_w(&(&bg * &ilc), &wv), &times_w(&(&ah * &ilc), &wv));
            t.le_scalar(norm(&(&ah - &pi))?, norm(&(&bg - &pi))?);
            t.le_scalar(cnorm(&(&ah - &pi)), cnorm(&(&bg - &pi)));
            let mut start = 0;
            let mut blocks = Vec::new();
            for &end in breaks {
                blocks.push(collapse_profile(&h[start..end], alpha));
                start = end;
            }
            let bb = beta_product(&a, &refs(&blocks));
            t.le_scalar(norm(&(&ah - &pi))?, norm(&(&bb - &pi))?);
            t.le_scalar(cnorm(&(&ah - &pi)), cnorm(&(&bb - &pi)));
        }
        GeometricInequality { lambda, f } => {
            require_supported(f, lambda, "f")?;
            let il = indicator(lambda);
            let m = &il * beta_product(&a, &refs(f)) * &il;
            let q = &il * &a * &il;
            let ih = diag(&collapse_values(f, n));
            match (geometric_series(&m), geometric_series(&q)) {
                (Ok((sm, tm)), Ok((sq, tq))) => {
                    let lhs = sm * &ih;
                    let rhs = sq * &il;
                    t.le(lhs.as_slice(), rhs.as_slice());
                    t.slack -= tm + tq;
                    mode = Some("full_series".to_string());
                }
                _ => {
                    const K: usize = 12;
                    let mut lhs = DMatrix::zeros(n, n);
                    let mut p = id.clone();
                    for _ in 0..K {
                        lhs += &p;
                        p = &p * &m;
                    }
                    let lhs = lhs * &ih;
                    let mut rhs = DMatrix::zeros(n, n);
                    let mut p = id.clone();
                    for _ in 0..=((K - 1) * f.len()) {
                        rhs += &p;
                        p = &p * &q;
                    }
                    let rhs = rhs * &il;
                    t.le(lhs.as_slice(), rhs.as_slice());
                    mode = Some("partial_sums".to_string());
                }
            }
        }
        GeometricReverse { lambda, f } => {
            require_supported(f, lambda, "f")?;
            let il = indicator(lambda);
            let m = &il * beta_product(&a, &refs(f)) * &il;
            let q = &il * &a * &il;
            let (sm, tm) = geometric_series(&m).map_err(|_| {
                Error::contract("geometric_reverse: Σ (I_Λ B I_Λ)^n does not converge")
            })?;
            let (sq, tq) = geometric_series(&q)?;
            let mut head = DMatrix::zeros(n, n);
            let mut p = id.clone();
            for _ in 0..f.len() {
                head += &p;
                p = &p * &q;
            }
            let rhs = &sm * &head;
            t.le(sq.as_slice(), rhs.as_slice());
            t.slack -= tq + tm * dense::inf_norm(&head);
        }
        BetaStarSum { f } => {
            for p in f {
                same_space(alpha, p)?;
            }
            let m = f.len();
            let mut sum = DMatrix::zeros(n, n);
            for i in 0..m {
                sum += diag(f[i].values()) * beta_star_product(&a, &refs(&f[i + 1..]));
            }
            let mut bound = DMatrix::zeros(n, n);
            let mut p = id.clone();
            for _ in 0..m {
                bound += &p;
                p = &p * &a;
            }
            t.le(&vec![0.0; n * n], sum.as_slice());
            t.le(sum.as_slice(), bound.as_slice());
            let lhs = &id - beta_product(&a, &refs(f));
            t.eq(lhs.as_slice(), (&sum * &i_minus_a).as_slice());
        }
    }
    let _ = col;
    Ok(t.inequality_report(check.name(), digest, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::SiteSpace;

    fn small() -> (Kernel, SiteSet) {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 0.4), (1, 0, 0.3), (1, 2, 0.5), (0, 0, 0.1)]).unwrap();
        let lam = SiteSet::from_indices(&s, [0, 1]).unwrap();
        (k, lam)
    }

    #[test]
    fn collapse_with_zero_profiles_is_trivial() {
        let (k, _) = small();
        let z = Profile::zeros(k.space());
        let r = verify_identity(&k, &IdentityCheck::Collapse { h1: z.clone(), h2: z }).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn support_violation_is_reported() {
        let (k, lam) = small();
        let h = Profile::point(k.space(), 2, 0.5);
        let err = verify_identity(&k, &IdentityCheck::PiProperties { lambda: lam, h }).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn missing_weight_is_reported() {
        let (k, lam) = small();
        let f = Profile::indicator(&lam);
        let err = verify_inequality(&k, None, &InequalityCheck::FlowPositivity { lambda: lam, f, h: vec![] })
            .unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn equal_profiles_give_zero_slack() {
        let (k, lam) = small();
        let w = WeightVector::ones(k.space());
        let h = Profile::scaled_indicator(&lam, 0.5);
        let r = verify_inequality(
            &k,
            Some(&w),
            &InequalityCheck::MultiMonotonicity {
                lambda: lam.clone(),
                f: Profile::indicator(&lam),
                g: vec![h.clone()],
                h: vec![h],
            },
        )
        .unwrap();
        assert_eq!(r.min_slack, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn single_term_betastar_sum() {
        let (k, _) = small();
        let f = Profile::new(k.space(), vec![0.2, 1.0, 0.0]).unwrap();
        let r = verify_inequality(&k, None, &InequalityCheck::BetaStarSum { f: vec![f] }).unwrap();
        assert!(r.pass);
        assert!(r.min_slack >= -1e-15);
    }

    #[test]
    fn geometric_identity_two_sites() {
        let s = SiteSpace::indexed(2);
        let k = Kernel::new(&s, [(0, 1, 0.7)]).unwrap();
        let lam = SiteSet::from_indices(&s, [0]).unwrap();
        let h = Profile::scaled_indicator(&lam, 0.25);
        let r = verify_identity(&k, &IdentityCheck::GeometricIdentity { lambda: lam, h }).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

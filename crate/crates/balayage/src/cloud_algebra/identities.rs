//! Coefficientwise verifiers for the cloud identities and inequalities.
//!
//! Both sides are evaluated on every marker up to a level cap.  With
//! exact (dyadic) weights an identity passes only with zero residual; with
//! float weights it passes when `max_residual ≤ 1e-10 · scale`.  Statements
//! about limits of series are checked separately, in floating point, by
//! running the partial sums until they settle (`limit_gap`).

use serde::Serialize;

use super::classify::classify;
use super::cloud::{Cloud, MARKER_NODE_CAP};
use super::marker::{all_markers, Marker};
use crate::cleaning_ops::VERIFY_REL_TOL;
use crate::error::{Error, Result};
use crate::kernel_core::SiteSet;
use crate::scalar::Scalar;

/// Names of the cloud verifiers, in canonical order.
pub const CLOUD_IDENTITY_NAMES: [&str; 10] = [
    "cumulative_convolution",
    "cumulative_beta",
    "collapse",
    "cumulative_inequality",
    "geometric_series",
    "series_bounds",
    "regular_comparison",
    "balayage_decomposition",
    "balayage_absorption",
    "regular_left_unit",
];

/// Largest number of series terms used when checking a limit.
pub const LIMIT_MAX_TERMS: usize = 20_000;

/// One cloud statement to verify, with its inputs.
#[derive(Debug, Clone)]
pub enum CloudIdentity<S: Scalar> {
    /// `(μ * ν)~ = μ * ν̃`.
    CumulativeConvolution {
        /// Left factor (finite).
        mu: Cloud<S>,
        /// Right factor (finite).
        nu: Cloud<S>,
    },
    /// `(μ * β_h)~ = μ̃ − μ * I_h`, and `β̃_h = 𝟏 − I_h`.
    CumulativeBeta {
        /// Finite cloud `μ`.
        mu: Cloud<S>,
        /// Profile values `h ∈ [0,1]`.
        h: Vec<S>,
    },
    /// `β_g * β_h = β_{1−(1−g)(1−h)} − I_g * ρ^1 * I_h * (ρ^0 − ρ^1)` and its
    /// cumulative form `(β_g * β_h)~ = β̃_{1−(1−g)(1−h)} − I_g * ρ^1 * I_h`.
    Collapse {
        /// Profile values `g`.
        g: Vec<S>,
        /// Profile values `h`.
        h: Vec<S>,
    },
    /// `(μ * ν)~(η) ≤ μ̃(η^-) ⫴ν⫴ + μ(η) ν((last η))` for `μ, ν ≥ 0`.
    CumulativeInequality {
        /// Nonnegative finite cloud `μ`.
        mu: Cloud<S>,
        /// Nonnegative finite cloud `ν`.
        nu: Cloud<S>,
    },
    /// `Σ_{k≤N} β_h^{*k} * I_h = 𝟏 − (β_h^{*(N+1)})~` for every `N ≤ terms`,
    /// and the limit `Σ_k β_h^{*k} * I_h = 𝟏_Λ` with `Λ = supp h`.
    GeometricSeries {
        /// Profile values `h`.
        h: Vec<S>,
        /// Largest `N` checked exactly.
        terms: usize,
    },
    /// For `ν ≥ 0`, `⫴ν⫴ ≤ 1`, `h = 1 − ν((·))`, `μ = 𝟏 − ν̃`:
    /// `I_h ≤ μ ≤ 𝟏`, `Σ_{n≤N} ν^{*n} * I_h ≤ Σ_{n≤N} ν^{*n} * μ =
    /// 𝟏 − (ν^{*(N+1)})~ ≤ 𝟏`; when `ν` is carried by `Λ = supp h` the limit
    /// dominates `𝟏_Λ`; when `ν` is `Λ`-regular, `μ` lives on `Λ`-markers and
    /// both `Σ ν^{*n} * μ` and `Σ (I_Λ ν I_Λ)^{*n} * μ` equal `𝟏_Λ`; when
    /// `ν ∈ 𝒮_1` has levels `≤ K`, `μ` has levels `≤ K − 1`.
    SeriesBounds {
        /// Nonnegative finite cloud of norm `≤ 1`.
        nu: Cloud<S>,
        /// Region `Λ` for the carried/regular parts.
        lambda: SiteSet,
        /// Largest `N` checked exactly.
        terms: usize,
    },
    /// `|μ − ν| ⊴ 2 |μ − ν| * I_Λ` for `Λ`-regular `μ, ν`.
    RegularComparison {
        /// `Λ`-regular cloud.
        mu: Cloud<S>,
        /// `Λ`-regular cloud.
        nu: Cloud<S>,
        /// Region `Λ`.
        lambda: SiteSet,
    },
    /// For `Λ`-regular `μ`: `μ − π_Λ = μ * I_Λ − (π_Λ − μ * I_{Λ^c})`,
    /// `π_Λ − μ * I_{Λ^c} = μ * I_Λ * π_Λ`, with `μ * I_Λ ≥ 0` on
    /// `Λ`-markers and `0 ≤ π_Λ − μ * I_{Λ^c} ⊴ μ * I_Λ` on `∂Λ`.
    BalayageDecomposition {
        /// `Λ`-regular cloud.
        mu: Cloud<S>,
        /// Region `Λ`.
        lambda: SiteSet,
    },
    /// `μ * π_Λ = π_Λ = π_Λ * μ` for `Λ`-regular `μ`.
    BalayageAbsorption {
        /// `Λ`-regular cloud.
        mu: Cloud<S>,
        /// Region `Λ`.
        lambda: SiteSet,
    },
    /// `I_{Λ^c} * μ = I_{Λ^c}` and `I_Λ * μ * I_Λ = μ * I_Λ` for `Λ`-regular `μ`.
    RegularLeftUnit {
        /// `Λ`-regular cloud.
        mu: Cloud<S>,
        /// Region `Λ`.
        lambda: SiteSet,
    },
}

impl<S: Scalar> CloudIdentity<S> {
    /// Canonical name.
    pub fn name(&self) -> &'static str {
        use CloudIdentity::*;
        let i = match self {
            CumulativeConvolution { .. } => 0,
            CumulativeBeta { .. } => 1,
            Collapse { .. } => 2,
            CumulativeInequality { .. } => 3,
            GeometricSeries { .. } => 4,
            SeriesBounds { .. } => 5,
            RegularComparison { .. } => 6,
            BalayageDecomposition { .. } => 7,
            BalayageAbsorption { .. } => 8,
            RegularLeftUnit { .. } => 9,
        };
        CLOUD_IDENTITY_NAMES[i]
    }
}

/// Outcome of a cloud verifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloudIdentityReport {
    /// Statement name.
    pub name: String,
    /// Largest coefficient discrepancy (or inequality violation).
    pub max_residual: f64,
    /// `max(1, largest absolute coefficient on either side)`.
    pub scale: f64,
    /// `true` when the residual was computed in exact arithmetic.
    pub exact: bool,
    /// Highest marker level examined.
    pub level_cap: usize,
    /// Largest distance of a series' partial sums from its limit, after
    /// running them until settled (float arithmetic).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_gap: Option<f64>,
    /// Sub-statements whose hypotheses held and were checked.
    pub parts: Vec<String>,
    /// Exact identities need zero residual; float ones `≤ 1e-10 · scale`;
    /// limits need `limit_gap ≤ 1e-10`.
    pub pass: bool,
}

struct Tally<S: Scalar> {
    markers: Vec<Marker>,
    residual: S,
    scale: S,
}

impl<S: Scalar> Tally<S> {
    fn see(&mut self, v: &S) {
        self.scale = self.scale.max_of(&v.abs());
    }

    fn eq_by(&mut self, a: impl Fn(&Marker) -> S, b: impl Fn(&Marker) -> S) {
        for m in &self.markers.clone() {
            let (x, y) = (a(m), b(m));
            self.see(&x);
            self.see(&y);
            self.residual = self.residual.max_of(&x.sub(&y).abs());
        }
    }

    fn le_by(&mut self, a: impl Fn(&Marker) -> S, b: impl Fn(&Marker) -> S) {
        for m in &self.markers.clone() {
            let (x, y) = (a(m), b(m));
            self.see(&x);
            self.see(&y);
            let excess = x.sub(&y);
            if excess.is_negative() {
                continue;
            }
            self.residual = self.residual.max_of(&excess);
        }
    }

    fn eq(&mut self, a: &Cloud<S>, b: &Cloud<S>) {
        self.eq_by(|m| a.value(m), |m| b.value(m));
    }

    fn zero_where(&mut self, a: &Cloud<S>, outside: impl Fn(&Marker) -> bool) {
        self.eq_by(|m| if outside(m) { a.value(m) } else { S::zero() }, |_| S::zero());
    }
}

fn ensure_nonnegative<S: Scalar>(c: &Cloud<S>, what: &str) -> Result<()> {
    if !c.is_nonnegative()? {
        return Err(Error::contract(format!("{what} must be a nonnegative cloud")));
    }
    Ok(())
}

fn ensure_regular<S: Scalar>(c: &Cloud<S>, lambda: &SiteSet, what: &str) -> Result<()> {
    let r = classify(c, Some(lambda))?;
    if r.lambda_regular != Some(true) {
        return Err(Error::contract(format!(
            "{what} must be Λ-regular ({})",
            r.regular_reason.unwrap_or_default()
        )));
    }
    Ok(())
}

fn profile_ok<S: Scalar>(n: usize, f: &[S]) -> Result<()> {
    if f.len() != n {
        return Err(Error::dimension("profile has the wrong length"));
    }
    if f.iter().any(|v| v.is_negative() || !v.le(&S::one())) {
        return Err(Error::contract("profile values must lie in [0, 1]"));
    }
    Ok(())
}

fn on_lambda(lambda: &SiteSet) -> impl Fn(&Marker) -> bool + '_ {
    move |m| m.path().iter().all(|&x| lambda.contains(x))
}

fn in_boundary(lambda: &SiteSet) -> impl Fn(&Marker) -> bool + '_ {
    move |m| {
        let p = m.path();
        p[..p.len() - 1].iter().all(|&x| lambda.contains(x)) && !lambda.contains(m.last())
    }
}

/// Runs one cloud verifier on every marker of level `≤ level_cap`.
pub fn verify_cloud_identity<S: Scalar>(
    check: &CloudIdentity<S>,
    level_cap: usize,
) -> Result<CloudIdentityReport> {
    use CloudIdentity::*;
    let space = match check {
        CumulativeConvolution { mu, .. }
        | CumulativeBeta { mu, .. }
        | CumulativeInequality { mu, .. }
        | RegularComparison { mu, .. }
        | BalayageDecomposition { mu, .. }
        | BalayageAbsorption { mu, .. }
        | RegularLeftUnit { mu, .. } => mu.space().clone(),
        SeriesBounds { nu, .. } => nu.space().clone(),
        Collapse { g, .. } => crate::kernel_core::SiteSpace::indexed(g.len().max(1)),
        GeometricSeries { h, .. } => crate::kernel_core::SiteSpace::indexed(h.len().max(1)),
    };
    let n = space.len();
    let markers = all_markers(n, level_cap, MARKER_NODE_CAP)?;
    let mut t = Tally { markers, residual: S::zero(), scale: S::one() };
    let mut parts: Vec<String> = Vec::new();
    let mut limit_gap = None;
    let one = Cloud::<S>::one(&space);
    match check {
        CumulativeConvolution { mu, nu } => {
            mu.space().ensure_same(nu.space(), "clouds")?;
            let lhs = mu.convolve(nu)?;
            let rhs = mu.convolve(&nu.cumulative_cloud())?;
            t.eq_by(|m| lhs.cumulative(m), |m| rhs.value(m));
            parts.push("cumulative of a convolution".into());
        }
        CumulativeBeta { mu, h } => {
            profile_ok(n, h)?;
            let b = Cloud::beta(&space, h)?;
            let ih = Cloud::indicator(&space, h)?;
            let lhs = mu.convolve(&b)?;
            let rhs = mu.cumulative_cloud().sub(&mu.convolve(&ih)?)?;
            t.eq_by(|m| lhs.cumulative(m), |m| rhs.value(m));
            t.eq_by(|m| b.cumulative(m), |m| one.value(m).sub(&ih.value(m)));
            parts.push("cumulative of a right cleaning factor".into());
            parts.push("cumulative of a cleaning cloud".into());
        }
        Collapse { g, h } => {
            profile_ok(n, g)?;
            profile_ok(n, h)?;
            let coll: Vec<S> = g
                .iter()
                .zip(h)
                .map(|(a, b)| S::one().sub(&S::one().sub(a).mul(&S::one().sub(b))))
                .collect();
            let lhs = Cloud::beta(&space, g)?.convolve(&Cloud::beta(&space, h)?)?;
            let cross = Cloud::indicator(&space, g)?
                .convolve(&Cloud::rho(&space, 1)?)?
                .convolve(&Cloud::indicator(&space, h)?)?;
            let diff = Cloud::rho(&space, 0)?.sub(&Cloud::rho(&space, 1)?)?;
            let bc = Cloud::beta(&space, &coll)?;
            let rhs = bc.sub(&cross.convolve(&diff)?)?;
            t.eq(&lhs, &rhs);
            t.eq_by(|m| lhs.cumulative(m), |m| bc.cumulative(m).sub(&cross.value(m)));
            parts.push("collapse".into());
            parts.push("cumulative collapse".into());
        }
        CumulativeInequality { mu, nu } => {
            ensure_nonnegative(mu, "μ")?;
            ensure_nonnegative(nu, "ν")?;
            let norm = nu.norm()?.ok_or_else(|| Error::contract("ν must have finite norm"))?;
            let lhs = mu.convolve(nu)?;
            t.le_by(
                |m| lhs.cumulative(m),
                |m| {
                    let before = m.parent().map(|p| mu.cumulative(&p)).unwrap_or_else(S::zero);
                    before.mul(&norm).add(&mu.value(m).mul(&nu.value(&Marker::single(m.last()))))
                },
            );
            parts.push("cumulative convolution bound".into());
        }
        GeometricSeries { h, terms } => {
            profile_ok(n, h)?;
            let b = Cloud::beta(&space, h)?;
            let ih = Cloud::indicator(&space, h)?;
            let mut power = Cloud::rho(&space, 0)?; // β_h^{*k}
            let mut partial = Cloud::zero(&space);
            for _ in 0..=*terms {
                partial = partial.add(&power.convolve_truncated(&ih, level_cap)?)?;
                power = power.convolve_truncated(&b, level_cap)?;
                t.eq_by(|m| partial.value(m), |m| S::one().sub(&power.cumulative(m)));
            }
            parts.push("partial sums".into());
            let lambda = SiteSet::from_mask(&space, h.iter().map(|v| !v.is_zero()).collect())?;
            let hf: Vec<f64> = h.iter().map(S::to_f64).collect();
            let bf = Cloud::<f64>::beta(&space, &hf)?;
            let ihf = Cloud::<f64>::indicator(&space, &hf)?;
            limit_gap = Some(series_limit_gap(&bf, &ihf, &Cloud::one_on(&lambda), &t.markers, level_cap)?);
            parts.push("limit equals the Λ-indicator cloud".into());
        }
        SeriesBounds { nu, lambda, terms } => {
            space.ensure_same(lambda.space(), "region")?;
            ensure_nonnegative(nu, "ν")?;
            let norm = nu.norm()?.expect("finite");
            if !norm.le(&S::one()) {
                return Err(Error::contract("ν must have norm at most 1"));
            }
            let hv: Vec<S> = (0..n).map(|x| S::one().sub(&nu.value(&Marker::single(x)))).collect();
            let ih = Cloud::indicator(&space, &hv)?;
            let mu = one.sub(&nu.cumulative_cloud())?.truncate(level_cap)?;
            t.le_by(|m| ih.value(m), |m| mu.value(m));
            t.le_by(|m| mu.value(m), |_| S::one());
            let mut power = Cloud::rho(&space, 0)?;
            let mut with_h = Cloud::zero(&space);
            let mut with_mu = Cloud::zero(&space);
            for _ in 0..=*terms {
                with_h = with_h.add(&power.convolve_truncated(&ih, level_cap)?)?;
                with_mu = with_mu.add(&power.convolve_truncated(&mu, level_cap)?)?;
                power = power.convolve_truncated(nu, level_cap)?;
                t.le_by(|m| with_h.value(m), |m| with_mu.value(m));
                t.eq_by(|m| with_mu.value(m), |m| S::one().sub(&power.cumulative(m)));
                t.le_by(|m| with_mu.value(m), |_| S::one());
            }
            parts.push("bounds and partial sums".into());

            let supp_is_lambda = (0..n).all(|x| lambda.contains(x) == !hv[x].is_zero());
            let report = classify(nu, Some(lambda))?;
            let nuf = nu.map_scalar(|w| Ok(w.to_f64()))?;
            let muf = mu.map_scalar(|w| Ok(w.to_f64()))?;
            let target = Cloud::<f64>::one_on(lambda);
            if report.carried_by == Some(true) && supp_is_lambda {
                let gap = series_lower_gap(&nuf, &muf, &target, &t.markers, level_cap)?;
                limit_gap = Some(limit_gap.map_or(gap, |g: f64| g.max(gap)));
                parts.push("limit dominates the Λ-indicator cloud".into());
            }
            if report.lambda_regular == Some(true) && supp_is_lambda {
                t.zero_where(&mu, |m| !on_lambda(lambda)(m));
                let gap = series_limit_gap(&nuf, &muf, &target, &t.markers, level_cap)?;
                let il = Cloud::<f64>::indicator_set(lambda);
                let inner = il.convolve(&nuf)?.convolve(&il)?;
                let gap2 = series_limit_gap(&inner, &muf, &target, &t.markers, level_cap)?;
                limit_gap = Some(limit_gap.map_or(gap.max(gap2), |g: f64| g.max(gap).max(gap2)));
                parts.push("limits equal the Λ-indicator cloud".into());
            }
            if report.in_s && report.s_value == Some(1.0) {
                let k = nu.level_bound().unwrap_or(0);
                t.zero_where(&mu, |m| m.level() + 1 > k);
                parts.push("level bound of 𝟏 − ν̃".into());
            }
        }
        RegularComparison { mu, nu, lambda } => {
            ensure_regular(mu, lambda, "μ")?;
            ensure_regular(nu, lambda, "ν")?;
            let d = mu.sub(nu)?.abs()?;
            let rhs = d.convolve(&Cloud::indicator_set(lambda))?.scale(&S::one().add(&S::one()));
            t.le_by(|m| d.cumulative(m), |m| rhs.cumulative(m));
            parts.push("difference bound".into());
        }
        BalayageDecomposition { mu, lambda } => {
            ensure_regular(mu, lambda, "μ")?;
            let pi = Cloud::<S>::balayage(lambda);
            let il = Cloud::indicator_set(lambda);
            let ilc = Cloud::indicator_set(&lambda.complement());
            let mul = mu.convolve(&il)?;
            let gap = pi.sub(&mu.convolve(&ilc)?)?;
            t.eq_by(|m| mu.value(m).sub(&pi.value(m)), |m| mul.value(m).sub(&gap.value(m)));
            let mulpi = mul.convolve(&pi)?;
            t.eq(&gap, &mulpi);
            t.le_by(|_| S::zero(), |m| mul.value(m));
            t.zero_where(&mul, |m| !on_lambda(lambda)(m));
            t.le_by(|_| S::zero(), |m| gap.value(m));
            t.le_by(|m| gap.cumulative(m), |m| mul.cumulative(m));
            t.zero_where(&gap, |m| !in_boundary(lambda)(m));
            parts.push("decomposition".into());
            parts.push("signs and supports".into());
        }
        BalayageAbsorption { mu, lambda } => {
            ensure_regular(mu, lambda, "μ")?;
            let pi = Cloud::<S>::balayage(lambda);
            t.eq(&mu.convolve(&pi)?, &pi);
            t.eq(&pi.convolve(mu)?, &pi);
            parts.push("right absorption".into());
            parts.push("left absorption".into());
        }
        RegularLeftUnit { mu, lambda } => {
            ensure_regular(mu, lambda, "μ")?;
            let il = Cloud::indicator_set(lambda);
            let ilc = Cloud::indicator_set(&lambda.complement());
            t.eq(&ilc.convolve(mu)?, &ilc);
            t.eq(&il.convolve(mu)?.convolve(&il)?, &mu.convolve(&il)?);
            parts.push("exit sites are fixed".into());
            parts.push("inner restriction".into());
        }
    }
    let residual = t.residual.to_f64();
    let scale = t.scale.to_f64();
    let identity_ok = if S::EXACT { t.residual.is_zero() } else { residual <= VERIFY_REL_TOL * scale };
    let limit_ok = limit_gap.is_none_or(|g| g <= VERIFY_REL_TOL);
    Ok(CloudIdentityReport {
        name: check.name().to_string(),
        max_residual: residual,
        scale,
        exact: S::EXACT,
        level_cap,
        limit_gap,
        parts,
        pass: identity_ok && limit_ok,
    })
}

/// Runs `S_N = Σ_{k≤N} ν^{*k} * μ` (levels `≤ cap`) until successive
/// partial sums stop changing, and returns `max |S_N − target|`.
fn series_limit_gap(
    nu: &Cloud<f64>,
    mu: &Cloud<f64>,
    target: &Cloud<f64>,
    markers: &[Marker],
    cap: usize,
) -> Result<f64> {
    let sum = run_series(nu, mu, cap)?;
    Ok(markers.iter().map(|m| (sum.value(m) - target.value(m)).abs()).fold(0.0, f64::max))
}

/// As [`series_limit_gap`], but only shortfalls below `target` count.
fn series_lower_gap(
    nu: &Cloud<f64>,
    mu: &Cloud<f64>,
    target: &Cloud<f64>,
    markers: &[Marker],
    cap: usize,
) -> Result<f64> {
    let sum = run_series(nu, mu, cap)?;
    Ok(markers.iter().map(|m| (target.value(m) - sum.value(m)).max(0.0)).fold(0.0, f64::max))
}

fn run_series(nu: &Cloud<f64>, mu: &Cloud<f64>, cap: usize) -> Result<Cloud<f64>> {
    let nu = nu.truncate(cap)?;
    let mu = mu.truncate(cap)?;
    let mut power = Cloud::<f64>::rho(nu.space(), 0)?;
    let mut sum = Cloud::zero(nu.space());
    for _ in 0..LIMIT_MAX_TERMS {
        let term = power.convolve_truncated(&mu, cap)?;
        let size = term.entries().expect("finite").values().fold(0.0f64, |a, v| a.max(v.abs()));
        sum = sum.add(&term)?;
        if size <= 1e-17 {
            return Ok(sum);
        }
        power = power.convolve_truncated(&nu, cap)?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::SiteSpace;
    use crate::scalar::Dyadic;

    fn d(k: u32) -> Dyadic {
        Dyadic::pow2_neg(k)
    }

    #[test]
    fn rho_zero_convolution_is_exact() {
        let s = SiteSpace::indexed(2);
        let nu = Cloud::beta(&s, &[d(1), d(2)]).unwrap();
        let mu = Cloud::rho(&s, 0).unwrap();
        let r = verify_cloud_identity(&CloudIdentity::CumulativeConvolution { mu, nu }, 3).unwrap();
        assert!(r.pass && r.exact);
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn collapse_exact() {
        let r = verify_cloud_identity(
            &CloudIdentity::Collapse { g: vec![d(1), d(3)], h: vec![d(2), Dyadic::one()] },
            3,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn geometric_series_reaches_indicator() {
        let r = verify_cloud_identity(
            &CloudIdentity::GeometricSeries { h: vec![d(1), d(2), Dyadic::zero()], terms: 4 },
            3,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.limit_gap.unwrap() <= 1e-10);
    }

    #[test]
    fn regular_clouds_absorb_balayage() {
        let s = SiteSpace::indexed(3);
        let lam = SiteSet::from_indices(&s, [0, 1]).unwrap();
        let b = Cloud::beta(&s, &[d(1), d(2), Dyadic::zero()]).unwrap();
        let mu = b.convolve(&b).unwrap();
        for check in [
            CloudIdentity::BalayageAbsorption { mu: mu.clone(), lambda: lam.clone() },
            CloudIdentity::BalayageDecomposition { mu: mu.clone(), lambda: lam.clone() },
            CloudIdentity::RegularLeftUnit { mu: mu.clone(), lambda: lam.clone() },
            CloudIdentity::RegularComparison { mu: mu.clone(), nu: b.clone(), lambda: lam.clone() },
            CloudIdentity::SeriesBounds { nu: mu.clone(), lambda: lam.clone(), terms: 3 },
        ] {
            let r = verify_cloud_identity(&check, 3).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn irregular_input_is_rejected() {
        let s = SiteSpace::indexed(2);
        let lam = SiteSet::from_indices(&s, [0]).unwrap();
        let b = Cloud::beta(&s, &[Dyadic::zero(), d(1)]).unwrap();
        let e = verify_cloud_identity(&CloudIdentity::BalayageAbsorption { mu: b, lambda: lam }, 2);
        assert!(matches!(e, Err(Error::Contract(_))));
    }
}

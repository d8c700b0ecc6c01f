//! Families about summability of `Σ_k c M^k w`: the star and the
//! unbounded-row kernels (existential conditions hold while the plain
//! series diverges), the doubling cloud on the shift, and the kernel
//! whose finite blocks all contract although no positive subinvariant
//! vector exists.

use serde::Serialize;

use super::{GalleryInstance, Params};
use crate::cleaning_ops::CleaningOperator;
use crate::cloud_algebra::{realize_left, Cloud, Marker};
use crate::error::{Error, Result};
use crate::io::Instance;
use crate::kernel_core::{
    check_fh, spectral_radius, DirtVector, Kernel, Profile, Quantity, SiteSet, SiteSpace, WeightVector,
    DEFAULT_SPR_MAX_ITER, DEFAULT_SPR_TOL,
};

/// `Σ_{k<terms} c_k · w` where `c_{k+1} = step(c_k)`, with the overflow
/// sentinel; stops early once the row vanishes.
pub fn series_by_steps(c: &[f64], w: &[f64], terms: usize, mut step: impl FnMut(&[f64]) -> Vec<f64>) -> Quantity {
    let mut row = c.to_vec();
    let mut total = 0.0f64;
    for k in 0..terms {
        let t: f64 = row.iter().zip(w).map(|(a, b)| a * b).sum();
        if !(total + t).is_finite() {
            return Quantity::Unbounded { truncated: total, parameter: k };
        }
        total += t;
        if row.iter().all(|&v| v == 0.0) {
            break;
        }
        row = step(&row);
    }
    Quantity::Finite { value: total }
}

/// Truncated series of a family where `Σ c (I_Λ α I_Λ)^k w` and
/// `Σ c (I_Λ β_{f_1}⋯β_{f_m} I_Λ)^k w` are compared.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistentialGap {
    /// Truncation parameter `M`.
    pub m: usize,
    /// `‖c‖_1`.
    pub c_norm: f64,
    /// `Σ_k c (I_Λ α I_Λ)^k w` (condition (a)).
    pub plain_series: Quantity,
    /// `Σ_k c (I_Λ β_Λ β_Λ I_Λ)^k w` with `f_1 = f_2 = χ_Λ` (condition (c′)).
    pub cleaned_series: Quantity,
    /// `C = max_x (I_Λ α I_Λ w)_x / w_x`.
    pub hypothesis_constant: f64,
}

fn existential_gap(inst: &Instance, m: usize) -> Result<ExistentialGap> {
    let lambda = inst.require_lambda("series comparison")?;
    let c = inst.require_c("series comparison")?;
    let w = inst.weight_or_ones();
    let k = &inst.kernel;
    let il = |v: Vec<f64>| -> Vec<f64> {
        v.into_iter().enumerate().map(|(i, x)| if lambda.contains(i) { x } else { 0.0 }).collect()
    };
    let c0 = il(c.values().to_vec());
    let n = k.dim();
    let terms = n + 2;
    let plain = series_by_steps(&c0, w.values(), terms, |r| il(k.left_apply(r)));
    let beta = CleaningOperator::new(k, &Profile::indicator(lambda))?;
    let cleaned = series_by_steps(&c0, w.values(), terms, |r| il(beta.left_apply(&beta.left_apply(r))));
    let aw = k.view(lambda, lambda).apply(w.values());
    let hypothesis_constant = lambda.iter().map(|x| aw[x] / w.get(x)).fold(0.0f64, f64::max);
    Ok(ExistentialGap { m, c_norm: c0.iter().sum(), plain_series: plain, cleaned_series: cleaned, hypothesis_constant })
}

/// The star: `X = {0, …, M}`, `α_{0j} = 1` for `j ≥ 1`, `w ≡ 1`,
/// `c_x = 1/(x+1)²`, `Λ = X`.  Profiles hold `f_1 = f_2 = χ_Λ`.
pub fn star_example(params: &mut Params) -> Result<GalleryInstance> {
    let m = params.usize("m", 10)?;
    if m == 0 {
        return Err(Error::contract("star_example needs m ≥ 1"));
    }
    let space = SiteSpace::indexed(m + 1);
    let kernel = Kernel::new(&space, (1..=m).map(|j| (0, j, 1.0)))?;
    let lambda = SiteSet::full(&space);
    let c = DirtVector::new(&space, (0..=m).map(|x| 1.0 / ((x + 1) * (x + 1)) as f64).collect())?;
    let chi = Profile::indicator(&lambda);
    let mut inst = Instance::new(kernel);
    inst.lambda = Some(lambda);
    inst.c = Some(c);
    inst.w = Some(WeightVector::ones(&space));
    inst.profiles = vec![chi.clone(), chi];
    Ok(GalleryInstance::new(
        "star_example",
        inst,
        format!(
            "row 0 truncated to M = {m} entries; the term k = 1 of the plain series equals c_0·M and replaces +∞; \
             all other terms are exact"
        ),
    ))
}

/// Series of the star truncated at `M`.
pub fn star_series(m: usize) -> Result<ExistentialGap> {
    let g = star_example(&mut Params::parse(&[format!("m={m}")])?)?;
    existential_gap(&g.instance, m)
}

/// The unbounded row: sites `x_1…x_M, y_1…y_M`, `α_{x_i y_j} = 1` for
/// `j ≤ i`, `w ≡ 1`, `c_{x_i} = c_{y_i} = 1/i²`, `Λ = X`.
pub fn unbounded_row_example(params: &mut Params) -> Result<GalleryInstance> {
    let m = params.usize("m", 10)?;
    if m == 0 {
        return Err(Error::contract("unbounded_row_example needs m ≥ 1"));
    }
    let names: Vec<String> =
        (1..=m).map(|i| format!("x{i}")).chain((1..=m).map(|i| format!("y{i}"))).collect();
    let space = SiteSpace::new(names)?;
    let entries = (0..m).flat_map(|i| (0..=i).map(move |j| (i, m + j, 1.0)));
    let kernel = Kernel::new(&space, entries)?;
    let lambda = SiteSet::full(&space);
    let c = DirtVector::new(&space, (0..2 * m).map(|x| 1.0 / (((x % m) + 1).pow(2)) as f64).collect())?;
    let chi = Profile::indicator(&lambda);
    let mut inst = Instance::new(kernel);
    inst.lambda = Some(lambda);
    inst.c = Some(c);
    inst.w = Some(WeightVector::ones(&space));
    inst.profiles = vec![chi.clone(), chi];
    Ok(GalleryInstance::new(
        "unbounded_row_example",
        inst,
        format!("pairs truncated at i ≤ M = {m}; (αw)_{{x_i}} = i is exact, its supremum grows like M"),
    ))
}

/// Series of the unbounded-row family truncated at `M`.
pub fn unbounded_row_series(m: usize) -> Result<ExistentialGap> {
    let g = unbounded_row_example(&mut Params::parse(&[format!("m={m}")])?)?;
    existential_gap(&g.instance, m)
}

/// The marker `(i, i+1, …, 2i)` (zero-based positions of sites `i..=2i`).
fn doubling_marker(i: usize) -> Marker {
    Marker::new((i - 1..2 * i).collect()).expect("nonempty path")
}

/// The right shift on `{1, …, M}` with `c ≡ 1`, `w_j = 1/j²`, `Λ = X`,
/// and the cloud `ν(η) = 1` iff `level(η) = first(η)`, restricted to the
/// markers the shift can follow (`(i, …, 2i)` with `2i ≤ M`); other
/// markers of that level carry zero kernel weight, so `T_ν` is unchanged.
pub fn shift_example(params: &mut Params) -> Result<GalleryInstance> {
    let m = params.usize("m", 16)?;
    if m == 0 {
        return Err(Error::contract("shift_example needs m ≥ 1"));
    }
    let space = SiteSpace::new((1..=m).map(|i| i.to_string()))?;
    let kernel = Kernel::new(&space, (0..m.saturating_sub(1)).map(|i| (i, i + 1, 1.0)))?;
    let cloud = Cloud::<f64>::finite(&space, (1..=m / 2).map(|i| (doubling_marker(i), 1.0)))?;
    let mut inst = Instance::new(kernel);
    inst.lambda = Some(SiteSet::full(&space));
    inst.c = Some(DirtVector::new(&space, vec![1.0; m])?);
    inst.w = Some(WeightVector::new(&space, (1..=m).map(|j| 1.0 / (j * j) as f64).collect())?);
    inst.cloud = Some(cloud);
    Ok(GalleryInstance::new(
        "shift_example",
        inst,
        format!(
            "shift truncated to {{1..{m}}}: dirt leaving site M is dropped, so (T_ν^k w)_i = 4^-k/i² only while 2^k·i ≤ M; \
             the cloud lists only the markers the shift can follow"
        ),
    ))
}

/// Series of the shift family truncated at `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftSeries {
    /// Truncation parameter `M`.
    pub m: usize,
    /// `Σ_k c α^k w`, computed by iteration.
    pub plain_series: f64,
    /// The harmonic number `H_M` (closed form of the plain series).
    pub harmonic: f64,
    /// `Σ_k c T_ν^k w`, computed by iteration through the cloud.
    pub cloud_series: f64,
    /// Closed form `Σ_k 4^{−k} · Σ_{i ≤ M/2^k} 1/i²`.
    pub cloud_closed_form: f64,
    /// The untruncated value `(π²/6)·(4/3)`, approached as `M → ∞`.
    pub cloud_limit: f64,
}

/// `Σ_{i=1}^{n} 1/i²`.
fn inverse_squares(n: usize) -> f64 {
    (1..=n).rev().map(|i| 1.0 / (i as f64 * i as f64)).sum()
}

/// Computes [`ShiftSeries`] at truncation `M`.
pub fn shift_series(m: usize) -> Result<ShiftSeries> {
    let g = shift_example(&mut Params::parse(&[format!("m={m}")])?)?;
    let inst = &g.instance;
    let c = inst.require_c("shift series")?.values().to_vec();
    let w = inst.weight_or_ones();
    let k = &inst.kernel;
    let plain = series_by_steps(&c, w.values(), m + 1, |r| k.left_apply(r)).to_f64();
    let nu = inst.cloud.as_ref().expect("shift instance carries its cloud");
    let mut err = None;
    let cloud_series = series_by_steps(&c, w.values(), 70, |r| {
        realize_left(r, nu, k).unwrap_or_else(|e| {
            err = Some(e);
            vec![0.0; r.len()]
        })
    })
    .to_f64();
    if let Some(e) = err {
        return Err(e);
    }
    let mut closed = 0.0;
    let mut quarter = 1.0;
    let mut span = m;
    while span > 0 {
        closed += quarter * inverse_squares(span);
        quarter /= 4.0;
        span /= 2;
    }
    let harmonic = (1..=m).rev().map(|i| 1.0 / i as f64).sum();
    Ok(ShiftSeries {
        m,
        plain_series: plain,
        harmonic,
        cloud_series,
        cloud_closed_form: closed,
        cloud_limit: std::f64::consts::PI.powi(2) / 6.0 * 4.0 / 3.0,
    })
}

/// `X = {1, …, M}`, `α_{11} = ε`, `α_{1j} = 1` (`j ≥ 2`),
/// `α_{i+1,i} = 2` (`i ≥ 2`); `c = δ_1`, `Λ = X`.
pub fn fh_failure(params: &mut Params) -> Result<GalleryInstance> {
    let m = params.usize("m", 8)?;
    let eps = params.f64("eps", 0.0)?;
    if m < 2 {
        return Err(Error::contract("fh_failure needs m ≥ 2"));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::contract("fh_failure needs 0 ≤ eps < 1"));
    }
    let space = SiteSpace::new((1..=m).map(|i| i.to_string()))?;
    let mut entries = vec![(0, 0, eps)];
    entries.extend((1..m).map(|j| (0, j, 1.0)));
    entries.extend((2..m).map(|i| (i, i - 1, 2.0)));
    let kernel = Kernel::new(&space, entries)?;
    let mut inst = Instance::new(kernel);
    inst.lambda = Some(SiteSet::full(&space));
    inst.c = Some(DirtVector::delta(&space, 0));
    Ok(GalleryInstance::new(
        "fh_failure",
        inst,
        format!(
            "truncated to {{1..{m}}}: every finite truncation admits a positive subinvariant w, but any such w \
             has w_1/w_2 ≥ (2^(M−1) − 1)/(1 − ε); the failure is an infinite-X phenomenon"
        ),
    ))
}

/// Behaviour of the truncations of [`fh_failure`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FhFailureReport {
    /// Truncation parameter `M`.
    pub m: usize,
    /// `ε`.
    pub eps: f64,
    /// Whether the truncation admits a positive subinvariant vector.
    pub fh_holds: bool,
    /// Whether a witness was constructed and verified in floating point.
    pub witness_verified: bool,
    /// `w_1 / w_2` of the verified witness.
    pub witness_ratio: Option<f64>,
    /// Lower bound `Σ_{j=2}^{M} 2^{j−2} / (1−ε)` on `w_1/w_2` for any witness.
    pub ratio_lower_bound: Quantity,
    /// `spr(α)` of the truncation (`ε`).
    pub radius: f64,
}

/// `Σ_{j=2}^{M} 2^{j−2} / (1−ε)` with the overflow sentinel.
pub fn fh_failure_ratio_bound(m: usize, eps: f64) -> Quantity {
    let mut total = 0.0f64;
    let mut term = 1.0f64;
    for j in 2..=m {
        let next = total + term / (1.0 - eps);
        if !next.is_finite() {
            return Quantity::Unbounded { truncated: total, parameter: j };
        }
        total = next;
        term *= 2.0;
    }
    Quantity::Finite { value: total }
}

/// Runs the decision procedure on the truncation at `M`.
pub fn fh_failure_report(m: usize, eps: f64) -> Result<FhFailureReport> {
    let g = fh_failure(&mut Params::parse(&[format!("m={m}"), format!("eps={eps}")])?)?;
    let k = &g.instance.kernel;
    let fh = check_fh(k)?;
    let ratio = fh.witness.as_ref().map(|w| w.get(0) / w.get(1));
    Ok(FhFailureReport {
        m,
        eps,
        fh_holds: fh.holds,
        witness_verified: fh.witness.is_some(),
        witness_ratio: ratio,
        ratio_lower_bound: fh_failure_ratio_bound(m, eps),
        radius: spectral_radius(k, DEFAULT_SPR_TOL, DEFAULT_SPR_MAX_ITER)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_gap_grows_linearly() {
        let s10 = star_series(10).unwrap();
        let s20 = star_series(20).unwrap();
        assert!((s10.plain_series.to_f64() - (s10.c_norm + 10.0)).abs() < 1e-12);
        assert!((s20.plain_series.to_f64() - (s20.c_norm + 20.0)).abs() < 1e-12);
        assert_eq!(s10.cleaned_series.to_f64(), s10.c_norm);
        assert_eq!(s10.hypothesis_constant, 10.0);
    }

    #[test]
    fn unbounded_row_gap() {
        let s = unbounded_row_series(6).unwrap();
        // c(αw) = Σ_i i/i² = H_6.
        let h6: f64 = (1..=6).map(|i| 1.0 / i as f64).sum();
        assert!((s.plain_series.to_f64() - (s.c_norm + h6)).abs() < 1e-12);
        assert_eq!(s.cleaned_series.to_f64(), s.c_norm);
        assert_eq!(s.hypothesis_constant, 6.0);
    }

    #[test]
    fn shift_cloud_doubles_sites() {
        let s = shift_series(40).unwrap();
        assert!((s.plain_series - s.harmonic).abs() < 1e-12);
        assert!((s.cloud_series - s.cloud_closed_form).abs() < 1e-12);
    }

    #[test]
    fn fh_failure_truncations() {
        let r = fh_failure_report(12, 0.5).unwrap();
        assert!(r.fh_holds && r.witness_verified);
        assert!(r.witness_ratio.unwrap() >= r.ratio_lower_bound.to_f64() * (1.0 - 1e-12));
        assert!((r.radius - 0.5).abs() < 1e-9);
        assert!(matches!(fh_failure_ratio_bound(1100, 0.0), Quantity::Unbounded { .. }));
    }
}

//! Dense-matrix helpers used by the verifier suites.
//!
//! Verifiers materialize every operator as an `n × n` dense matrix (with
//! `n ≤` [`DENSE_LIMIT`]) so that residuals are plain entrywise
//! differences.  The application paths elsewhere in the crate stay sparse.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel_core::{Kernel, Profile, SiteSet};

/// Largest site count accepted by dense verifiers.
pub const DENSE_LIMIT: usize = 64;

/// Fails unless the space is small enough for dense verification.
pub fn ensure_dense_size(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(Error::contract(format!(
            "dense verification is limited to {DENSE_LIMIT} sites, got {n}"
        )));
    }
    Ok(())
}

/// Diagonal matrix `I_f`.
pub fn diag(values: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(values))
}

/// Indicator matrix `I_Λ`.
pub fn indicator(set: &SiteSet) -> DMatrix<f64> {
    let v: Vec<f64> = set.mask().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    diag(&v)
}

/// `β_f = I_{1−f} + I_f α` for a dense `α` and raw profile values.
pub fn beta(alpha: &DMatrix<f64>, f: &[f64]) -> DMatrix<f64> {
    let n = alpha.nrows();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = f[i] * alpha[(i, j)];
        }
        m[(i, i)] += 1.0 - f[i];
    }
    m
}

/// `β*_f = I_{1−f} + α I_f` for a dense `α` and raw profile values.
pub fn beta_star(alpha: &DMatrix<f64>, f: &[f64]) -> DMatrix<f64> {
    let n = alpha.nrows();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = alpha[(i, j)] * f[j];
        }
        m[(i, i)] += 1.0 - f[i];
    }
    m
}

/// Ordered product `β_{f_1} ⋯ β_{f_n}` (identity for an empty list).
pub fn beta_product(alpha: &DMatrix<f64>, profiles: &[&Profile]) -> DMatrix<f64> {
    let n = alpha.nrows();
    profiles
        .iter()
        .fold(DMatrix::identity(n, n), |acc, p| acc * beta(alpha, p.values()))
}

/// Ordered product `β*_{f_1} ⋯ β*_{f_n}` (identity for an empty list).
pub fn beta_star_product(alpha: &DMatrix<f64>, profiles: &[&Profile]) -> DMatrix<f64> {
    let n = alpha.nrows();
    profiles
        .iter()
        .fold(DMatrix::identity(n, n), |acc, p| acc * beta_star(alpha, p.values()))
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Unweighted `∞`-norm (largest absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Dense copy of a kernel, after the size check.
pub fn kernel_dense(alpha: &Kernel) -> Result<DMatrix<f64>> {
    ensure_dense_size(alpha.dim())?;
    Ok(alpha.to_dense())
}

/// `Σ_{k≥0} M^k` for a matrix whose powers decay, summed by doubling.
///
/// Returns the partial sum together with a rigorous bound on the largest
/// absolute entry of the neglected tail.  Fails with a non-contraction
/// error when the powers do not decay within 64 doublings.
pub fn geometric_series(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let n = m.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut power = m.clone();
    let mut terms = 1usize;
    for _ in 0..64 {
        let p = inf_norm(&power);
        if p < 1.0 {
            let tail = p / (1.0 - p) * inf_norm(&sum);
            if tail <= 1e-16 * inf_norm(&sum).max(1.0) {
                return Ok((sum, tail));
            }
        }
        if !p.is_finite() {
            break;
        }
        sum = &sum + &power * &sum;
        power = &power * &power;
        terms = terms.saturating_mul(2);
    }
    let p = inf_norm(&power);
    if p < 1.0 {
        let tail = p / (1.0 - p) * inf_norm(&sum);
        return Ok((sum, tail));
    }
    Err(Error::NonContraction { terms, tail_bound: f64::INFINITY, tol: 0.0 })
}

/// Sites of `Λ` from which some `Λ`-path reaches `Λ^c` in one more step.
/// Rows of the balayage outside this set vanish identically.
pub fn reaching_sites(alpha: &Kernel, lambda: &SiteSet) -> Vec<bool> {
    let n = alpha.dim();
    let mut reach = vec![false; n];
    // Reverse adjacency restricted to Λ.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack = Vec::new();
    for (i, j, _) in alpha.entries() {
        if !lambda.contains(i) {
            continue;
        }
        if lambda.contains(j) {
            preds[j].push(i);
        } else if !reach[i] {
            reach[i] = true;
            stack.push(i);
        }
    }
    while let Some(y) = stack.pop() {
        for &x in &preds[y] {
            if !reach[x] {
                reach[x] = true;
                stack.push(x);
            }
        }
    }
    reach
}

/// Exact dense balayage `Π_Λ`, by solving `(I − Q_DD) Π_D = R_D` on the
/// sites `D ⊆ Λ` that can reach `Λ^c`.
///
/// Fails with a non-contraction error when that block is not invertible
/// with a nonnegative inverse (i.e. `spr(Q_DD) ≥ 1`).
pub fn balayage_exact(alpha: &Kernel, lambda: &SiteSet) -> Result<DMatrix<f64>> {
    ensure_dense_size(alpha.dim())?;
    let n = alpha.dim();
    let reach = reaching_sites(alpha, lambda);
    let d: Vec<usize> = (0..n).filter(|&i| reach[i]).collect();
    let out: Vec<usize> = (0..n).filter(|&i| !lambda.contains(i)).collect();
    let mut pi = DMatrix::zeros(n, n);
    for &y in &out {
        pi[(y, y)] = 1.0;
    }
    if d.is_empty() || out.is_empty() {
        return Ok(pi);
    }
    let k = d.len();
    let mut a = DMatrix::<f64>::identity(k, k);
    let mut r = DMatrix::<f64>::zeros(k, out.len());
    for (li, &x) in d.iter().enumerate() {
        for &(y, v) in alpha.row(x) {
            if let Ok(lj) = d.binary_search(&y) {
                a[(li, lj)] -= v;
            } else if let Ok(oj) = out.binary_search(&y) {
                r[(li, oj)] += v;
            }
        }
    }
    let lu = a.lu();
    let sol = lu.solve(&r).ok_or(Error::NonContraction {
        terms: 0,
        tail_bound: f64::INFINITY,
        tol: 0.0,
    })?;
    // A negative entry means the Neumann series diverges.
    let scale = sol.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if sol.iter().any(|v| !v.is_finite() || *v < -1e-9 * scale) {
        return Err(Error::NonContraction { terms: 0, tail_bound: f64::INFINITY, tol: 0.0 });
    }
    for (li, &x) in d.iter().enumerate() {
        for (oj, &y) in out.iter().enumerate() {
            pi[(x, y)] = sol[(li, oj)].max(0.0);
        }
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::SiteSpace;

    #[test]
    fn beta_and_beta_star() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        let b = beta(&a, &[0.5, 1.0]);
        assert_eq!(b, DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.0]));
        let bs = beta_star(&a, &[0.5, 1.0]);
        assert_eq!(bs, DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.25, 0.0]));
    }

    #[test]
    fn two_site_balayage() {
        let s = SiteSpace::indexed(2);
        let k = Kernel::new(&s, [(0, 1, 0.3)]).unwrap();
        let lam = SiteSet::from_indices(&s, [0]).unwrap();
        let pi = balayage_exact(&k, &lam).unwrap();
        assert_eq!(pi, DMatrix::from_row_slice(2, 2, &[0.0, 0.3, 0.0, 1.0]));
    }

    #[test]
    fn geometric_series_of_nilpotent() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        let (s, tail) = geometric_series(&m).unwrap();
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]));
        assert_eq!(tail, 0.0);
        assert!(geometric_series(&DMatrix::identity(2, 2)).is_err());
    }
}

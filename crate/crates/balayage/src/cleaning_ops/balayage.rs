//! Truncated balayage `Π_Λ^(n) = Σ_{k≤n} (I_Λ α)^k I_{Λ^c}` with a
//! certified bound on the distance to the limit `Π_Λ`.
//!
//! Only the sites `D ⊆ Λ` from which dirt can reach `Λ^c` carry nonzero
//! rows; every other row of `Λ` vanishes identically at every truncation
//! order.  On `D`, with `Q = α_DD` and `R = α_{D,Λ^c}`, the rows of
//! `Π^(n)` are `Σ_{k<n} Q^k R` and the neglected part is exactly
//! `Q^n Π_D` (the split `β_Λ^n = Π^(n) + Q^n I_Λ`).  Hence:
//!
//! * if `αw ≤ w` on the rows of `Λ`, then `Π w ≤ w` and the tail is at
//!   most `‖Q^n‖_{w→w}`;
//! * otherwise, whenever `q = ‖Q^n‖_{w→w} < 1`, the tail is at most
//!   `q/(1−q) · max_x (Π^(n) w)_x / w_x`.

use nalgebra::DMatrix;

use crate::dense::reaching_sites;
use crate::error::{Error, Result};
use crate::kernel_core::{sup_ratio, Kernel, SiteSet, WeightVector};

/// Blocks up to this size are summed by dense doubling.
const DENSE_DOUBLING_LIMIT: usize = 256;

/// Which argument certifies the tail bound of a [`BalayageResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailCertificate {
    /// The series terminated: the matrix is exactly `Π_Λ`.
    Exact,
    /// `w` is subinvariant on `Λ`, so the tail is at most `‖Q^n‖_{w→w}`.
    Subinvariant,
    /// Geometric bound `q/(1−q) · ‖Π^(n) w / w‖_∞` with `q = ‖Q^n‖_{w→w}`.
    Geometric,
}

/// A truncated balayage with its truncation certificate.
#[derive(Debug, Clone)]
pub struct BalayageResult {
    /// The region `Λ`.
    pub lambda: SiteSet,
    /// `Π_Λ^(n)` as a sparse nonnegative matrix.
    pub matrix: Kernel,
    /// Truncation order `n` (number of kernel steps summed).
    pub terms_used: usize,
    /// Certified bound on `‖Π_Λ − Π_Λ^(n)‖_{w→w}`.
    pub tail_bound: f64,
    /// How `tail_bound` was certified.
    pub certificate: TailCertificate,
}

impl BalayageResult {
    /// Dense copy of the matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        self.matrix.to_dense()
    }

    /// `c Π^(n)` for a raw row vector.
    pub fn left_apply(&self, c: &[f64]) -> Vec<f64> {
        self.matrix.left_apply(c)
    }
}

/// Computes `Π_Λ^(n)` for the smallest supported `n` whose certified tail
/// bound is at most `tol`, summing at most `max_terms` kernel steps.
///
/// Exhausting the budget is reported as [`Error::NonContraction`], which
/// is the expected outcome when `(I_Λ α I_Λ)^ℓ` does not decay.
pub fn balayage(
    alpha: &Kernel,
    lambda: &SiteSet,
    w: &WeightVector,
    tol: f64,
    max_terms: usize,
) -> Result<BalayageResult> {
    alpha.space().ensure_same(lambda.space(), "balayage region")?;
    alpha.space().ensure_same(w.space(), "balayage weight")?;
    if !(tol >= 0.0) {
        return Err(Error::contract("balayage tolerance must be nonnegative"));
    }
    let n = alpha.dim();
    let wv = w.values();
    let reach = reaching_sites(alpha, lambda);
    let d: Vec<usize> = (0..n).filter(|&i| reach[i]).collect();
    let out: Vec<usize> = (0..n).filter(|&i| !lambda.contains(i)).collect();
    let subinvariant_on_lambda = lambda
        .iter()
        .all(|x| alpha.row(x).iter().map(|&(y, v)| v * wv[y]).sum::<f64>() <= wv[x] * (1.0 + 1e-12));

    let local_q = |x: usize| -> Vec<(usize, f64)> {
        alpha
            .row(x)
            .iter()
            .filter_map(|&(y, v)| d.binary_search(&y).ok().map(|l| (l, v)))
            .collect()
    };
    let q_rows: Vec<Vec<(usize, f64)>> = d.iter().map(|&x| local_q(x)).collect();
    let r_rows: Vec<Vec<(usize, f64)>> = d
        .iter()
        .map(|&x| {
            alpha
                .row(x)
                .iter()
                .filter_map(|&(y, v)| out.binary_search(&y).ok().map(|l| (l, v)))
                .collect()
        })
        .collect();
    let wd: Vec<f64> = d.iter().map(|&x| wv[x]).collect();
    let wout: Vec<f64> = out.iter().map(|&y| wv[y]).collect();

    let summed = if d.is_empty() || out.is_empty() {
        Summed { rows: DMatrix::zeros(d.len(), out.len()), terms: 0, tail: 0.0, exact: true }
    } else if d.len() <= DENSE_DOUBLING_LIMIT {
        sum_by_doubling(&q_rows, &r_rows, &wd, &wout, subinvariant_on_lambda, tol, max_terms)?
    } else {
        sum_by_steps(&q_rows, &r_rows, &wd, &wout, subinvariant_on_lambda, tol, max_terms)?
    };

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &y in &out {
        rows[y].push((y, 1.0));
    }
    for (li, &x) in d.iter().enumerate() {
        for (oj, &y) in out.iter().enumerate() {
            let v = summed.rows[(li, oj)];
            if v > 0.0 {
                rows[x].push((y, v));
            }
        }
    }
    let certificate = if summed.exact {
        TailCertificate::Exact
    } else if subinvariant_on_lambda {
        TailCertificate::Subinvariant
    } else {
        TailCertificate::Geometric
    };
    Ok(BalayageResult {
        lambda: lambda.clone(),
        matrix: Kernel::from_rows_unchecked(alpha.space(), rows),
        terms_used: summed.terms,
        tail_bound: summed.tail,
        certificate,
    })
}

struct Summed {
    rows: DMatrix<f64>,
    terms: usize,
    tail: f64,
    exact: bool,
}

fn tail_estimate(q_norm: f64, partial: &DMatrix<f64>, wd: &[f64], wout: &[f64], fh: bool) -> f64 {
    if q_norm == 0.0 {
        return 0.0;
    }
    if fh {
        return q_norm;
    }
    if q_norm >= 1.0 {
        return f64::INFINITY;
    }
    let pw: Vec<f64> = partial.row_iter().map(|r| r.iter().zip(wout).map(|(a, b)| a * b).sum()).collect();
    q_norm / (1.0 - q_norm) * sup_ratio(&pw, wd)
}

fn weighted_norm_dense(m: &DMatrix<f64>, w: &[f64]) -> f64 {
    m.row_iter()
        .zip(w)
        .map(|(r, wx)| r.iter().zip(w).map(|(a, b)| a.abs() * b).sum::<f64>() / wx)
        .fold(0.0, f64::max)
}

fn sum_by_doubling(
    q_rows: &[Vec<(usize, f64)>],
    r_rows: &[Vec<(usize, f64)>],
    wd: &[f64],
    wout: &[f64],
    fh: bool,
    tol: f64,
    max_terms: usize,
) -> Result<Summed> {
    let k = q_rows.len();
    let mut q = DMatrix::<f64>::zeros(k, k);
    for (i, row) in q_rows.iter().enumerate() {
        for &(j, v) in row {
            q[(i, j)] = v;
        }
    }
    let mut r = DMatrix::<f64>::zeros(k, wout.len());
    for (i, row) in r_rows.iter().enumerate() {
        for &(j, v) in row {
            r[(i, j)] = v;
        }
    }
    // Partial sum after N steps: G_N R with G_N = Σ_{k<N} Q^k, P = Q^N.
    let mut terms = 1usize;
    let mut g = DMatrix::<f64>::identity(k, k);
    let mut p = q.clone();
    loop {
        let partial = &g * &r;
        let q_norm = weighted_norm_dense(&p, wd);
        let tail = tail_estimate(q_norm, &partial, wd, wout, fh);
        if tail <= tol {
            return Ok(Summed { rows: partial, terms, tail, exact: q_norm == 0.0 });
        }
        if terms.saturating_mul(2) > max_terms || !q_norm.is_finite() {
            return Err(Error::NonContraction { terms, tail_bound: tail, tol });
        }
        g = &g + &p * &g;
        p = &p * &p;
        terms *= 2;
    }
}

fn sum_by_steps(
    q_rows: &[Vec<(usize, f64)>],
    r_rows: &[Vec<(usize, f64)>],
    wd: &[f64],
    wout: &[f64],
    fh: bool,
    tol: f64,
    max_terms: usize,
) -> Result<Summed> {
    let k = q_rows.len();
    let m = wout.len();
    let mut term = DMatrix::<f64>::zeros(k, m);
    for (i, row) in r_rows.iter().enumerate() {
        for &(j, v) in row {
            term[(i, j)] = v;
        }
    }
    let mut partial = term.clone();
    // v = Q^N w_D tracks ‖Q^N‖_{w→w} for nonnegative Q.
    let apply = |x: &[f64]| -> Vec<f64> {
        q_rows.iter().map(|row| row.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    };
    let mut v = apply(wd);
    let mut terms = 1usize;
    loop {
        let q_norm = sup_ratio(&v, wd);
        let tail = tail_estimate(q_norm, &partial, wd, wout, fh);
        if tail <= tol {
            return Ok(Summed { rows: partial, terms, tail, exact: q_norm == 0.0 });
        }
        if terms >= max_terms || !q_norm.is_finite() {
            return Err(Error::NonContraction { terms, tail_bound: tail, tol });
        }
        let mut next = DMatrix::<f64>::zeros(k, m);
        for (i, row) in q_rows.iter().enumerate() {
            for &(j, a) in row {
                for c in 0..m {
                    next[(i, c)] += a * term[(j, c)];
                }
            }
        }
        term = next;
        partial += &term;
        v = apply(&v);
        terms += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::SiteSpace;

    #[test]
    fn whole_space_gives_zero() {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let r = balayage(&k, &SiteSet::full(&s), &WeightVector::ones(&s), 1e-12, 100).unwrap();
        assert_eq!(r.matrix.nnz(), 0);
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn empty_region_gives_identity() {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let r = balayage(&k, &SiteSet::empty(&s), &WeightVector::ones(&s), 1e-12, 100).unwrap();
        assert_eq!(r.to_dense(), DMatrix::identity(3, 3));
    }

    #[test]
    fn two_site_hand_example() {
        let s = SiteSpace::indexed(2);
        for p in [0.0, 0.3, 1.0] {
            let k = Kernel::new(&s, [(0, 1, p)]).unwrap();
            let lam = SiteSet::from_indices(&s, [0]).unwrap();
            let r = balayage(&k, &lam, &WeightVector::ones(&s), 0.0, 10).unwrap();
            assert_eq!(r.to_dense(), DMatrix::from_row_slice(2, 2, &[0.0, p, 0.0, 1.0]));
        }
    }

    #[test]
    fn non_contraction_reported() {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 0.5)]).unwrap();
        let lam = SiteSet::from_indices(&s, [0, 1]).unwrap();
        let err = balayage(&k, &lam, &WeightVector::ones(&s), 1e-12, 64).unwrap_err();
        assert!(err.is_non_convergence());
    }
}

//! Sparse nonnegative kernels and their restrictions.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel_core::space::{SiteSet, SiteSpace};

/// A sparse nonnegative square matrix `α` over a site space.
///
/// Rows are stored row-major as `(column, value)` pairs sorted by column,
/// with no explicit zeros.  Cloning shares the row storage.
#[derive(Clone, PartialEq)]
pub struct Kernel {
    space: SiteSpace,
    rows: Arc<Vec<Vec<(usize, f64)>>>,
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Kernel")
            .field("sites", &self.space.len())
            .field("nnz", &self.nnz())
            .finish()
    }
}

impl Kernel {
    /// Builds a kernel from `(row, column, value)` triples.  Values must be
    /// finite and nonnegative; zero values are dropped; a repeated position
    /// is a contract error.
    pub fn new<I>(space: &SiteSpace, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let n = space.len();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, v) in entries {
            if i >= n || j >= n {
                return Err(Error::dimension(format!(
                    "entry ({i}, {j}) out of range for a space of {n} sites"
                )));
            }
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::contract(format!(
                    "kernel entry ({}, {}) is {v}, expected a finite nonnegative value",
                    space.name(i),
                    space.name(j)
                )));
            }
            rows[i].push((j, v));
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::contract(format!(
                    "kernel entry ({}, {}) given twice",
                    space.name(i),
                    space.name(w[0].0)
                )));
            }
            row.retain(|&(_, v)| v != 0.0);
        }
        Ok(Self { space: space.clone(), rows: Arc::new(rows) })
    }

    /// Builds a kernel from `(row site, column site, value)` triples.
    pub fn from_named<I, S>(space: &SiteSpace, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: AsRef<str>,
    {
        let triples = entries
            .into_iter()
            .map(|(a, b, v)| Ok((space.index_of(a.as_ref())?, space.index_of(b.as_ref())?, v)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, triples)
    }

    /// The zero kernel.
    pub fn zero(space: &SiteSpace) -> Self {
        Self { space: space.clone(), rows: Arc::new(vec![Vec::new(); space.len()]) }
    }

    /// Builds a kernel from a dense nonnegative matrix.
    pub fn from_dense(space: &SiteSpace, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != space.len() || m.ncols() != space.len() {
            return Err(Error::dimension("dense matrix shape differs from space size"));
        }
        let mut triples = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != 0.0 {
                    triples.push((i, j, v));
                }
            }
        }
        Self::new(space, triples)
    }

    pub(crate) fn from_rows_unchecked(space: &SiteSpace, rows: Vec<Vec<(usize, f64)>>) -> Self {
        debug_assert_eq!(rows.len(), space.len());
        Self { space: space.clone(), rows: Arc::new(rows) }
    }

    /// Dense copy.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.space.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// The ambient space.
    pub fn space(&self) -> &SiteSpace {
        &self.space
    }

    /// Number of sites.
    pub fn dim(&self) -> usize {
        self.space.len()
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Stored entries of row `i`, sorted by column.
    #[inline]
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Entry `α_ij` (zero when absent).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |&(c, _)| c).map(|k| row[k].1).unwrap_or(0.0)
    }

    /// All stored entries as `(row, column, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, v)| (i, j, v)))
    }

    /// Right action `αv` (column vector).
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().map(|&(j, a)| a * v[j]).sum()).collect()
    }

    /// Left action `cα` (row vector, i.e. dirt transport).
    pub fn left_apply(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            let ci = c[i];
            if ci != 0.0 {
                for &(j, a) in row {
                    out[j] += ci * a;
                }
            }
        }
        out
    }

    /// Borrowed view of `I_rows α I_cols`.
    pub fn view<'a>(&'a self, rows: &'a SiteSet, cols: &'a SiteSet) -> KernelView<'a> {
        KernelView { kernel: self, rows, cols }
    }

    /// Owned copy of `I_rows α I_cols`.
    pub fn restricted(&self, rows: &SiteSet, cols: &SiteSet) -> Kernel {
        let new_rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                if rows.contains(i) {
                    row.iter().copied().filter(|&(j, _)| cols.contains(j)).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        Self::from_rows_unchecked(&self.space, new_rows)
    }

    /// Owned copy of `I_Λ α I_Λ`.
    pub fn restricted_to(&self, lambda: &SiteSet) -> Kernel {
        self.restricted(lambda, lambda)
    }

    /// Multiplies every entry by `s ≥ 0`.
    pub fn scaled(&self, s: f64) -> Result<Kernel> {
        Self::new(&self.space, self.entries().map(|(i, j, v)| (i, j, v * s)))
    }

    /// Largest row sum.
    pub fn max_row_sum(&self) -> f64 {
        self.rows.iter().map(|r| r.iter().map(|&(_, v)| v).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest entry.
    pub fn max_entry(&self) -> f64 {
        self.entries().map(|(_, _, v)| v).fold(0.0, f64::max)
    }
}

/// A borrowed view of `I_rows α I_cols` that avoids copying the kernel.
#[derive(Debug, Clone, Copy)]
pub struct KernelView<'a> {
    kernel: &'a Kernel,
    rows: &'a SiteSet,
    cols: &'a SiteSet,
}

impl<'a> KernelView<'a> {
    /// Right action `(I_rows α I_cols) v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.kernel.dim())
            .map(|i| {
                if self.rows.contains(i) {
                    self.kernel
                        .row(i)
                        .iter()
                        .filter(|&&(j, _)| self.cols.contains(j))
                        .map(|&(j, a)| a * v[j])
                        .sum()
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Left action `c (I_rows α I_cols)`.
    pub fn left_apply(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.kernel.dim()];
        for i in self.rows.iter() {
            let ci = c[i];
            if ci != 0.0 {
                for &(j, a) in self.kernel.row(i) {
                    if self.cols.contains(j) {
                        out[j] += ci * a;
                    }
                }
            }
        }
        out
    }

    /// Stored entries of row `i` that survive the restriction.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let keep_row = self.rows.contains(i);
        self.kernel
            .row(i)
            .iter()
            .copied()
            .filter(move |&(j, _)| keep_row && self.cols.contains(j))
    }

    /// Number of sites of the ambient space.
    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    /// The underlying kernel.
    pub fn kernel(&self) -> &Kernel {
        self.kernel
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_access() {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 0.5), (0, 0, 0.0), (2, 1, 2.0)]).unwrap();
        assert_eq!(k.nnz(), 2);
        assert_eq!(k.get(0, 1), 0.5);
        assert_eq!(k.get(1, 1), 0.0);
        assert!(Kernel::new(&s, [(0, 1, -1.0)]).is_err());
        assert!(Kernel::new(&s, [(0, 1, 1.0), (0, 1, 2.0)]).is_err());
        assert!(Kernel::new(&s, [(0, 3, 1.0)]).is_err());
    }

    #[test]
    fn actions_match_dense() {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 0.5), (1, 2, 1.0), (2, 0, 0.25), (2, 2, 0.5)]).unwrap();
        let d = k.to_dense();
        let v = [1.0, 2.0, 3.0];
        let dv = &d * nalgebra::DVector::from_column_slice(&v);
        assert_eq!(k.apply(&v), dv.as_slice());
        let cd = nalgebra::RowDVector::from_row_slice(&v) * &d;
        assert_eq!(k.left_apply(&v), cd.as_slice().to_vec());
    }

    #[test]
    fn view_matches_owned_restriction() {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 0.5), (1, 2, 1.0), (2, 0, 0.25), (1, 1, 0.5)]).unwrap();
        let lam = SiteSet::from_indices(&s, [0, 1]).unwrap();
        let v = [1.0, 2.0, 3.0];
        assert_eq!(k.view(&lam, &lam).apply(&v), k.restricted_to(&lam).apply(&v));
        assert_eq!(k.view(&lam, &lam).left_apply(&v), k.restricted_to(&lam).left_apply(&v));
    }
}

//! Class structure and spectral radii of nonnegative kernels.
//!
//! The classes of `α` are the strongly connected components of the
//! positivity digraph `{x → y : α_xy > 0}`.  The spectral radius of `α`
//! is the largest spectral radius of its diagonal class blocks `α_JJ`.
//! Each block is handled by power iteration on the shifted block
//! `α_JJ + I`, which is primitive whenever `J` is irreducible, so the
//! Collatz–Wielandt quotients `min_i (Bx)_i/x_i ≤ spr(B) ≤ max_i (Bx)_i/x_i`
//! bracket the answer and shrink to it.  Small blocks additionally square
//! the iteration matrix to accelerate convergence.

use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::kernel_core::kernel::Kernel;

/// Default absolute accuracy for spectral radii.
pub const DEFAULT_SPR_TOL: f64 = 1e-12;
/// Default iteration budget for spectral radii.
pub const DEFAULT_SPR_MAX_ITER: usize = 100_000;
/// Largest class handled with dense repeated squaring.
const DENSE_CLASS_LIMIT: usize = 256;

/// Strongly connected components of a kernel, in topological order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDecomposition {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    successors: Vec<Vec<usize>>,
    radii: Vec<f64>,
    perron: Vec<Vec<f64>>,
}

impl ClassDecomposition {
    /// Classes as sorted site lists.  If some site of class `a` points to a
    /// site of class `b ≠ a`, then `a < b` (upstream classes come first).
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Number of classes.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    /// `true` when there are no classes (never for a nonempty space).
    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class containing site `x`.
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    /// Classes directly reachable from class `c` (the condensation DAG).
    pub fn successors(&self, c: usize) -> &[usize] {
        &self.successors[c]
    }

    /// Spectral radius of the diagonal block `α_JJ` of class `c`.
    pub fn radius(&self, c: usize) -> f64 {
        self.radii[c]
    }

    /// All class radii.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// A class is final when no edge leaves it.
    pub fn is_final(&self, c: usize) -> bool {
        self.successors[c].is_empty()
    }

    /// Positive Perron vector of the block of class `c`, aligned with
    /// `classes()[c]` and normalized to maximum 1.
    pub fn perron_vector(&self, c: usize) -> &[f64] {
        &self.perron[c]
    }

    /// Spectral radius of the whole kernel: the largest class radius.
    pub fn spectral_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }
}

/// Computes the classes, their DAG and per-class spectral radii.
pub fn class_decomposition(alpha: &Kernel) -> Result<ClassDecomposition> {
    class_decomposition_with(alpha, DEFAULT_SPR_TOL, DEFAULT_SPR_MAX_ITER)
}

/// [`class_decomposition`] with explicit accuracy and iteration budget.
pub fn class_decomposition_with(alpha: &Kernel, tol: f64, max_iter: usize) -> Result<ClassDecomposition> {
    let n = alpha.dim();
    let mut g = DiGraph::<(), ()>::with_capacity(n, alpha.nnz());
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (i, j, _) in alpha.entries() {
        g.add_edge(nodes[i], nodes[j], ());
    }
    // tarjan_scc yields components in reverse topological order.
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|ni| ni.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    classes.reverse();
    let mut class_of = vec![0; n];
    for (c, members) in classes.iter().enumerate() {
        for &x in members {
            class_of[x] = c;
        }
    }
    let mut successors = vec![Vec::new(); classes.len()];
    for (i, j, _) in alpha.entries() {
        let (a, b) = (class_of[i], class_of[j]);
        if a != b {
            debug_assert!(a < b, "classes must be topologically ordered");
            successors[a].push(b);
        }
    }
    for s in &mut successors {
        s.sort_unstable();
        s.dedup();
    }
    let mut radii = Vec::with_capacity(classes.len());
    let mut perron = Vec::with_capacity(classes.len());
    for members in &classes {
        let (r, v) = class_radius(alpha, members, &class_of, tol, max_iter)?;
        radii.push(r);
        perron.push(v);
    }
    Ok(ClassDecomposition { classes, class_of, successors, radii, perron })
}

/// Spectral radius `spr(A)` of a nonnegative kernel, to absolute accuracy
/// `tol`, using at most `max_iter` power-iteration steps per class.
///
/// On budget exhaustion the error carries the best certified bracket.
pub fn spectral_radius(a: &Kernel, tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::contract("spectral radius tolerance must be positive"));
    }
    Ok(class_decomposition_with(a, tol, max_iter)?.spectral_radius())
}

/// Radius and Perron vector of one irreducible diagonal block.
fn class_radius(
    alpha: &Kernel,
    members: &[usize],
    class_of: &[usize],
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Vec<f64>)> {
    let m = members.len();
    if m == 1 {
        let x = members[0];
        return Ok((alpha.get(x, x), vec![1.0]));
    }
    let class = class_of[members[0]];
    let local = |x: usize| members.binary_search(&x).expect("member of class");
    // Shifted block B = α_JJ + I as local sparse rows.
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
    for &x in members {
        let mut row: Vec<(usize, f64)> = alpha
            .row(x)
            .iter()
            .filter(|&&(y, _)| class_of[y] == class)
            .map(|&(y, v)| (local(y), v))
            .collect();
        let lx = local(x);
        match row.iter_mut().find(|(j, _)| *j == lx) {
            Some(e) => e.1 += 1.0,
            None => row.push((lx, 1.0)),
        }
        rows.push(row);
    }
    let apply_b = |x: &[f64]| -> Vec<f64> {
        rows.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    };
    let mut dense: Option<DMatrix<f64>> = if m <= DENSE_CLASS_LIMIT {
        let mut d = DMatrix::zeros(m, m);
        for (i, r) in rows.iter().enumerate() {
            for &(j, v) in r {
                d[(i, j)] = v;
            }
        }
        Some(d)
    } else {
        None
    };
    let mut x = vec![1.0; m];
    let (mut best_lo, mut best_hi) = (0.0f64, f64::INFINITY);
    for iter in 1..=max_iter {
        let y = apply_b(&x);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (a, b) in y.iter().zip(&x) {
            let q = a / b;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        best_lo = best_lo.max(lo);
        best_hi = best_hi.min(hi);
        let width_goal = tol.max(8.0 * f64::EPSILON * best_hi);
        if best_hi - best_lo <= width_goal {
            let r = (0.5 * (best_lo + best_hi) - 1.0).max(0.0);
            let scale = x.iter().copied().fold(0.0, f64::max);
            return Ok((r, x.iter().map(|v| v / scale).collect()));
        }
        // Advance the iterate, by a high power of B when available.
        let next: Vec<f64> = match &dense {
            Some(d) => {
                let v = d * DVector::from_column_slice(&x);
                v.as_slice().to_vec()
            }
            None => y.clone(),
        };
        let scale = next.iter().copied().fold(0.0, f64::max);
        x = if scale.is_finite() && scale > 0.0 && next.iter().all(|v| *v > 0.0) {
            next.into_iter().map(|v| v / scale).collect()
        } else {
            let s = y.iter().copied().fold(0.0, f64::max);
            y.into_iter().map(|v| v / s).collect()
        };
        if let Some(d) = dense.as_mut() {
            if iter % 2 == 0 && iter <= 120 {
                let sq = &*d * &*d;
                let s = sq.max();
                if s.is_finite() && s > 0.0 {
                    *d = sq / s;
                }
            }
        }
    }
    Err(Error::IterationLimit {
        iterations: max_iter,
        lower: (best_lo - 1.0).max(0.0),
        upper: best_hi - 1.0,
    })
}

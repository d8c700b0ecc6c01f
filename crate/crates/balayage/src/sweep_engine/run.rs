//! Contraction profiles `ρ_Λ(ℓ)`, `ρ_Λ(ℓ; c)` and convergence traces of
//! cleaning schedules.

use std::fmt::Write as _;

use serde::Serialize;

use super::schedule::{ScaledSchedule, Schedule};
use crate::cleaning_ops::{left_apply_beta, BalayageResult};
use crate::error::{Error, Result};
use crate::kernel_core::{sup_ratio, wnorm, DirtVector, Kernel, SiteSet, WeightVector};

/// `ρ_Λ(ℓ)` for `ℓ = 0..=max_ell`.
///
/// Without `c` this is the operator form `‖(I_Λ α I_Λ)^ℓ‖_{w→w}`; with `c`
/// the vector form `‖c (I_Λ α I_Λ)^ℓ‖_w`.  The zeroth power is `I_Λ`.
pub fn contraction_profile(
    alpha: &Kernel,
    lambda: &SiteSet,
    w: &WeightVector,
    c: Option<&DirtVector>,
    max_ell: usize,
) -> Result<Vec<f64>> {
    let space = alpha.space();
    space.ensure_same(lambda.space(), "contraction profile region")?;
    space.ensure_same(w.space(), "contraction profile weight")?;
    let inner = alpha.view(lambda, lambda);
    let wv = w.values();
    let mask = |v: &mut Vec<f64>| {
        for (x, val) in v.iter_mut().enumerate() {
            if !lambda.contains(x) {
                *val = 0.0;
            }
        }
    };
    let mut out = Vec::with_capacity(max_ell + 1);
    match c {
        Some(c) => {
            space.ensure_same(c.space(), "contraction profile dirt")?;
            let mut v = c.values().to_vec();
            mask(&mut v);
            for _ in 0..=max_ell {
                out.push(wnorm(&v, wv));
                v = inner.left_apply(&v);
            }
        }
        None => {
            // For a nonnegative operator the w-norm is max_x (A^ℓ w)_x / w_x.
            let mut v = wv.to_vec();
            mask(&mut v);
            for _ in 0..=max_ell {
                out.push(sup_ratio(&v, wv));
                v = inner.apply(&v);
            }
        }
    }
    Ok(out)
}

/// One row of a [`ConvergenceTrace`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    /// Number of cleaning steps applied.
    pub n: usize,
    /// `‖c β_{h_1} ⋯ β_{h_n} I_Λ‖_w`: dirt still inside `Λ`.
    pub dirt_in_lambda: f64,
    /// `‖c (β_{h_1} ⋯ β_{h_n} − Π_Λ)‖_w`, when a balayage was supplied.
    pub deviation: Option<f64>,
    /// `min_{x∈Λ} Σ_{i≤n} h_i(x)` (0 for empty `Λ`).
    pub coverage_min: f64,
    /// `max_{x∈Λ} Σ_{i≤n} h_i(x)` (0 for empty `Λ`).
    pub coverage_max: f64,
}

/// Step-by-step record of a cleaning run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    /// One record per step, `n = 1, 2, …`.
    pub records: Vec<TraceRecord>,
    /// Certified bound on `‖Π_Λ − Π_Λ^(n)‖_{w→w}` of the balayage used for
    /// the deviation column (0 when exact or absent).
    pub balayage_tail_bound: f64,
    /// The dirt vector after the last step.
    #[serde(skip)]
    pub final_dirt: Vec<f64>,
}

impl ConvergenceTrace {
    /// The last record.
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// First step `n` whose deviation is at most `threshold`.
    pub fn first_deviation_below(&self, threshold: f64) -> Option<usize> {
        self.records.iter().find(|r| r.deviation.is_some_and(|d| d <= threshold)).map(|r| r.n)
    }

    /// CSV with columns `n,dirt_in_lambda,deviation,coverage_min,coverage_max`,
    /// preceded by one `#` comment line per entry of `header`.
    pub fn to_csv(&self, header: &[String]) -> String {
        let mut s = String::new();
        for h in header {
            let _ = writeln!(s, "# {h}");
        }
        s.push_str("n,dirt_in_lambda,deviation,coverage_min,coverage_max\n");
        for r in &self.records {
            let dev = r.deviation.map(|d| format!("{d:e}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{:e},{},{:e},{:e}",
                r.n, r.dirt_in_lambda, dev, r.coverage_min, r.coverage_max
            );
        }
        s
    }
}

/// Applies `n_steps` steps of `schedule` to `c` and records dirt left in
/// `Λ`, the deviation from `c Π_Λ` (when `balayage` is given) and the
/// cumulative coverage of `Λ`.
///
/// Divergence is a valid outcome and is simply recorded.  A finite
/// schedule shorter than `n_steps` is a contract error.
pub fn run_schedule(
    c: &DirtVector,
    schedule: &Schedule,
    alpha: &Kernel,
    w: &WeightVector,
    n_steps: usize,
    balayage: Option<&BalayageResult>,
) -> Result<ConvergenceTrace> {
    let space = alpha.space();
    space.ensure_same(c.space(), "run_schedule dirt")?;
    space.ensure_same(w.space(), "run_schedule weight")?;
    space.ensure_same(schedule.space(), "run_schedule schedule")?;
    if let Some(len) = schedule.len() {
        if len < n_steps {
            return Err(Error::contract(format!(
                "the schedule has {len} steps but {n_steps} were requested"
            )));
        }
    }
    let lambda = schedule.lambda();
    let (target, tail) = match balayage {
        Some(b) => {
            if b.lambda != *lambda {
                return Err(Error::contract("the balayage was computed for a different region"));
            }
            (Some(b.left_apply(c.values())), b.tail_bound)
        }
        None => (None, 0.0),
    };
    let wv = w.values();
    let lam = lambda.indices();
    let mut dirt = c.values().to_vec();
    let mut coverage = vec![0.0; space.len()];
    let mut records = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let h = schedule.step(n).expect("length checked above");
        dirt = left_apply_beta(alpha, h.values(), &dirt);
        h.accumulate(&mut coverage);
        records.push(record(n, &dirt, target.as_deref(), wv, &lam, &coverage));
    }
    Ok(ConvergenceTrace { records, balayage_tail_bound: tail, final_dirt: dirt })
}

/// [`run_schedule`] for a single-site schedule, without materializing
/// profiles (each step costs one kernel row).
pub fn run_scaled_schedule(
    c: &DirtVector,
    schedule: &ScaledSchedule,
    lambda: &SiteSet,
    alpha: &Kernel,
    w: &WeightVector,
    balayage: Option<&BalayageResult>,
) -> Result<ConvergenceTrace> {
    let space = alpha.space();
    space.ensure_same(c.space(), "run_scaled_schedule dirt")?;
    space.ensure_same(w.space(), "run_scaled_schedule weight")?;
    space.ensure_same(lambda.space(), "run_scaled_schedule region")?;
    ScaledSchedule::new(lambda, schedule.sites.clone(), schedule.scales.clone())?;
    let target = balayage.map(|b| b.left_apply(c.values()));
    let wv = w.values();
    let lam = lambda.indices();
    let mut dirt = c.values().to_vec();
    let mut coverage = vec![0.0; space.len()];
    let mut records = Vec::with_capacity(schedule.len());
    for (i, (&x, &eps)) in schedule.sites.iter().zip(&schedule.scales).enumerate() {
        sweep_site(alpha, &mut dirt, x, eps);
        coverage[x] += eps;
        records.push(record(i + 1, &dirt, target.as_deref(), wv, &lam, &coverage));
    }
    Ok(ConvergenceTrace {
        records,
        balayage_tail_bound: balayage.map_or(0.0, |b| b.tail_bound),
        final_dirt: dirt,
    })
}

/// `c ← c β_{ε δ_x}` in place.
pub(crate) fn sweep_site(alpha: &Kernel, dirt: &mut [f64], x: usize, eps: f64) {
    let moved = eps * dirt[x];
    if moved == 0.0 {
        return;
    }
    dirt[x] -= moved;
    for &(y, a) in alpha.row(x) {
        dirt[y] += moved * a;
    }
}

fn record(
    n: usize,
    dirt: &[f64],
    target: Option<&[f64]>,
    w: &[f64],
    lam: &[usize],
    coverage: &[f64],
) -> TraceRecord {
    let dirt_in_lambda = lam.iter().map(|&x| dirt[x].abs() * w[x]).sum();
    let deviation = target.map(|t| dirt.iter().zip(t).zip(w).map(|((a, b), wx)| (a - b).abs() * wx).sum());
    let (lo, hi) = lam
        .iter()
        .map(|&x| coverage[x])
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    TraceRecord {
        n,
        dirt_in_lambda,
        deviation,
        coverage_min: if lam.is_empty() { 0.0 } else { lo },
        coverage_max: hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cleaning_ops::balayage;
    use crate::kernel_core::{Profile, SiteSpace};
    use crate::sweep_engine::round_robin;

    #[test]
    fn nilpotent_chain_profile() {
        let s = SiteSpace::indexed(3);
        let k = Kernel::new(&s, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let full = SiteSet::full(&s);
        let rho = contraction_profile(&k, &full, &WeightVector::ones(&s), None, 3).unwrap();
        assert_eq!(rho, vec![1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn one_full_sweep_without_kernel_removes_dirt() {
        let s = SiteSpace::indexed(3);
        let lam = SiteSet::from_indices(&s, [0, 1]).unwrap();
        let k = Kernel::zero(&s);
        let sch = Schedule::new(&lam, vec![Profile::indicator(&lam)]).unwrap();
        let c = DirtVector::new(&s, vec![1.0, 2.0, 3.0]).unwrap();
        let t = run_schedule(&c, &sch, &k, &WeightVector::ones(&s), 1, None).unwrap();
        assert_eq!(t.records[0].dirt_in_lambda, 0.0);
        assert_eq!(t.records[0].coverage_min, 1.0);
    }

    #[test]
    fn round_robin_reaches_balayage() {
        let s = SiteSpace::indexed(3);
        let lam = SiteSet::from_indices(&s, [0, 1]).unwrap();
        let k = Kernel::new(&s, [(0, 1, 0.5), (1, 0, 0.25), (1, 2, 0.5), (0, 2, 0.5)]).unwrap();
        let w = WeightVector::ones(&s);
        let b = balayage(&k, &lam, &w, 1e-14, 1 << 12).unwrap();
        let c = DirtVector::new(&s, vec![1.0, 1.0, 0.0]).unwrap();
        let t = run_schedule(&c, &round_robin(&lam, 1.0).unwrap(), &k, &w, 60, Some(&b)).unwrap();
        assert!(t.last().unwrap().deviation.unwrap() < 1e-12);
        let csv = t.to_csv(&["seed=0".to_string()]);
        assert!(csv.starts_with("# seed=0\nn,dirt_in_lambda"));
        assert_eq!(csv.lines().count(), 62);
    }
}

//! Decision procedure for the existence of a strictly positive
//! subinvariant vector (`w > 0` with `αw ≤ w`) on a finite site space.
//!
//! Such a `w` exists iff `spr(α) ≤ 1` and every class `J` with
//! `spr(α_JJ) = 1` is final.  When it exists, a witness is assembled class
//! by class from the most downstream class upwards:
//!
//! * a final class of radius 1 receives its Perron vector;
//! * any other class solves `(I − α_JJ) w_J = α_{J,down} w_down + 1`
//!   by a truncated Neumann series, which leaves a margin of 1 in every
//!   row of `αw ≤ w`.
//!
//! The assembled vector is always re-verified with
//! [`is_subinvariant`](crate::kernel_core::is_subinvariant).

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::kernel_core::kernel::Kernel;
use crate::kernel_core::norms::is_subinvariant;
use crate::kernel_core::spectral::{class_decomposition, ClassDecomposition};
use crate::kernel_core::vectors::WeightVector;

/// Class radii within this distance of 1 are treated as equal to 1.
pub const UNIT_RADIUS_TOL: f64 = 1e-9;
/// Relative tolerance used when re-verifying the witness.
pub const WITNESS_TOL: f64 = 1e-10;

/// Why a positive subinvariant vector does not exist.
#[derive(Debug, Clone, PartialEq)]
pub enum FhViolation {
    /// A class has spectral radius above 1.
    RadiusExcess {
        /// Offending class (index into the decomposition).
        class: usize,
        /// `spr(α_JJ) − 1 > 0`.
        excess: f64,
    },
    /// A class of radius 1 feeds into other classes.
    NonFinalUnitClass {
        /// Offending class (index into the decomposition).
        class: usize,
    },
}

/// Outcome of [`check_fh`].
#[derive(Debug, Clone)]
pub struct FhReport {
    /// Whether a strictly positive `w` with `αw ≤ w` exists.
    pub holds: bool,
    /// A verified witness, when one could be constructed.
    pub witness: Option<WeightVector>,
    /// The reason for failure, when `holds` is false.
    pub violation: Option<FhViolation>,
    /// The class structure used for the decision.
    pub decomposition: ClassDecomposition,
}

impl FhReport {
    /// Sites of the violating class, if any.
    pub fn violating_class(&self) -> Option<&[usize]> {
        let c = match self.violation.as_ref()? {
            FhViolation::RadiusExcess { class, .. } | FhViolation::NonFinalUnitClass { class } => *class,
        };
        Some(&self.decomposition.classes()[c])
    }
}

/// Decides whether `α` admits a strictly positive subinvariant vector and
/// constructs one when it does.
pub fn check_fh(alpha: &Kernel) -> Result<FhReport> {
    let dec = class_decomposition(alpha)?;
    for c in 0..dec.len() {
        let r = dec.radius(c);
        if r > 1.0 + UNIT_RADIUS_TOL {
            return Ok(FhReport {
                holds: false,
                witness: None,
                violation: Some(FhViolation::RadiusExcess { class: c, excess: r - 1.0 }),
                decomposition: dec,
            });
        }
        if (r - 1.0).abs() <= UNIT_RADIUS_TOL && !dec.is_final(c) {
            return Ok(FhReport {
                holds: false,
                witness: None,
                violation: Some(FhViolation::NonFinalUnitClass { class: c }),
                decomposition: dec,
            });
        }
    }
    let witness = build_witness(alpha, &dec)
        .filter(|w| is_subinvariant(alpha, w, WITNESS_TOL).unwrap_or(false));
    Ok(FhReport { holds: true, witness, violation: None, decomposition: dec })
}

fn build_witness(alpha: &Kernel, dec: &ClassDecomposition) -> Option<WeightVector> {
    let n = alpha.dim();
    let mut w = vec![0.0; n];
    for c in (0..dec.len()).rev() {
        let members = &dec.classes()[c];
        let r = dec.radius(c);
        if (r - 1.0).abs() <= UNIT_RADIUS_TOL {
            for (&x, &v) in members.iter().zip(dec.perron_vector(c)) {
                w[x] = v;
            }
            continue;
        }
        // Right-hand side α_{J,down} w_down + 1.
        let local = |x: usize| members.binary_search(&x).ok();
        let m = members.len();
        let mut block = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DVector::<f64>::from_element(m, 1.0);
        for (li, &x) in members.iter().enumerate() {
            for &(y, v) in alpha.row(x) {
                match local(y) {
                    Some(lj) => block[(li, lj)] = v,
                    None => rhs[li] += v * w[y],
                }
            }
        }
        let sol = neumann_solve(&block, &rhs)?;
        for (li, &x) in members.iter().enumerate() {
            w[x] = sol[li];
        }
    }
    WeightVector::new(alpha.space(), w).ok()
}

/// Solves `(I − M) x = b` for a nonnegative `M` with `spr(M) < 1` as
/// `x = Σ_k M^k b`, summed by doubling: `S_{2N} = S_N + M^N S_N`.
pub(crate) fn neumann_solve(m: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = m.nrows();
    if n == 0 {
        return Some(b.clone());
    }
    let mut power = m.clone();
    let mut sum = DMatrix::<f64>::identity(n, n);
    for _ in 0..64 {
        let norm = power.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
        if norm <= 1e-18 {
            break;
        }
        sum = &sum + &power * &sum;
        power = &power * &power;
        if !power.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    let x = sum * b;
    x.iter().all(|v| v.is_finite() && *v > 0.0).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::space::SiteSpace;

    #[test]
    fn zero_kernel_holds_with_unit_witness() {
        let s = SiteSpace::indexed(3);
        let r = check_fh(&Kernel::zero(&s)).unwrap();
        assert!(r.holds);
        assert_eq!(r.witness.unwrap().values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn unit_class_feeding_downstream_fails() {
        let s = SiteSpace::indexed(2);
        for b in [0.0, 0.5, 1.0] {
            let a = Kernel::new(&s, [(0, 0, 1.0), (0, 1, 0.7), (1, 1, b)]).unwrap();
            let r = check_fh(&a).unwrap();
            assert!(!r.holds, "b = {b}");
            assert_eq!(r.violating_class().unwrap(), &[0]);
        }
    }

    #[test]
    fn radius_excess_detected() {
        let s = SiteSpace::indexed(2);
        let a = Kernel::new(&s, [(0, 1, 2.0), (1, 0, 2.0)]).unwrap();
        let r = check_fh(&a).unwrap();
        assert!(!r.holds);
        match r.violation.unwrap() {
            FhViolation::RadiusExcess { excess, .. } => assert!((excess - 1.0).abs() < 1e-9),
            v => panic!("unexpected violation {v:?}"),
        }
    }

    #[test]
    fn witness_for_mixed_structure() {
        // A stochastic final cycle fed by a transient site.
        let s = SiteSpace::indexed(4);
        let a = Kernel::new(
            &s,
            [(0, 0, 0.5), (0, 1, 3.0), (1, 2, 1.0), (2, 1, 1.0), (3, 0, 0.9), (3, 3, 0.2)],
        )
        .unwrap();
        let r = check_fh(&a).unwrap();
        assert!(r.holds);
        let w = r.witness.unwrap();
        assert!(is_subinvariant(&a, &w, 1e-10).unwrap());
    }
}

//! Property tests for cleaning operators, the balayage and the verifier
//! suites.

use balayage::cleaning_ops::{IDENTITY_NAMES, INEQUALITY_NAMES};
use balayage::dense;
use balayage::random::{
    random_cleanable_subset, random_fh_instance, random_profile, sample_identity_check, sample_inequality_check,
};
use balayage::{
    apply_cleaning, balayage, verify_identity, verify_inequality, weighted_operator_norm, CleaningOperator,
    DirtVector, IdentityCheck, Kernel, Profile, SiteSet, SiteSpace, WeightVector,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cleaning_is_a_contraction_under_fh(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let inst = random_fh_instance(&mut r, n).unwrap();
        let f = random_profile(&mut r, &SiteSet::full(inst.kernel.space()));
        let b = dense::beta(&inst.kernel.to_dense(), f.values());
        prop_assert!(weighted_operator_norm(&b, &inst.w).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn balayage_is_idempotent_with_unit_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let inst = random_fh_instance(&mut r, n).unwrap();
        let lambda = random_cleanable_subset(&mut r, &inst.kernel).unwrap();
        let pi = balayage(&inst.kernel, &lambda, &inst.w, 1e-13, 1_000_000).unwrap();
        let m = pi.to_dense();
        let res = (&m * &m - &m).abs().max();
        prop_assert!(res <= 1e-9, "Π² − Π residual {}", res);
        let norm = weighted_operator_norm(&m, &inst.w).unwrap();
        if lambda.is_full() {
            prop_assert_eq!(norm, 0.0);
        } else {
            prop_assert!((norm - 1.0).abs() <= 1e-9 + pi.tail_bound, "‖Π‖ = {}", norm);
        }
    }

    #[test]
    fn identities_hold_on_random_instances(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(5..=8);
        let inst = random_fh_instance(&mut r, n).unwrap();
        let lambda = random_cleanable_subset(&mut r, &inst.kernel).unwrap();
        for name in IDENTITY_NAMES {
            let check = sample_identity_check(&mut r, &inst.kernel, &lambda, name).unwrap();
            let rep = verify_identity(&inst.kernel, &check).unwrap();
            prop_assert!(rep.pass, "{:?}", rep);
        }
    }

    #[test]
    fn inequalities_hold_on_random_fh_instances(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=8);
        let inst = random_fh_instance(&mut r, n).unwrap();
        let lambda = random_cleanable_subset(&mut r, &inst.kernel).unwrap();
        for name in INEQUALITY_NAMES {
            let check = sample_inequality_check(&mut r, &inst.kernel, &lambda, name).unwrap();
            let rep = verify_inequality(&inst.kernel, Some(&inst.w), &check).unwrap();
            prop_assert!(rep.pass, "{:?}", rep);
        }
    }

    #[test]
    fn stochastic_kernels_conserve_dirt(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=7);
        let space = SiteSpace::indexed(n);
        let mut entries = Vec::new();
        for x in 0..n {
            let raw: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0)).collect();
            let s: f64 = raw.iter().sum();
            entries.extend(raw.into_iter().enumerate().map(|(y, v)| (x, y, v / s)));
        }
        let alpha = Kernel::new(&space, entries).unwrap();
        let c = DirtVector::new(&space, (0..n).map(|_| r.gen_range(0.0..1.0)).collect()).unwrap();
        let total: f64 = c.values().iter().sum();
        let mut d = c;
        for _ in 0..20 {
            let f = random_profile(&mut r, &SiteSet::full(&space));
            d = apply_cleaning(&d, &CleaningOperator::new(&alpha, &f).unwrap()).unwrap();
        }
        let after: f64 = d.values().iter().sum();
        prop_assert!((after - total).abs() <= 1e-12 * total.max(1.0));
    }
}

#[test]
fn degenerate_inputs() {
    let s = SiteSpace::indexed(3);
    let alpha = Kernel::new(&s, [(0, 1, 0.5), (1, 2, 0.5), (2, 0, 0.5)]).unwrap();
    let w = WeightVector::ones(&s);
    // Empty region: Π_∅ = I.
    let pi = balayage(&alpha, &SiteSet::empty(&s), &w, 0.0, 10).unwrap();
    assert_eq!(pi.to_dense(), nalgebra::DMatrix::identity(3, 3));
    // Zero profile: β_0 = I.
    let c = DirtVector::new(&s, vec![0.25, 0.5, 1.0]).unwrap();
    let same = apply_cleaning(&c, &CleaningOperator::new(&alpha, &Profile::zeros(&s)).unwrap()).unwrap();
    assert_eq!(same, c);
    let check = IdentityCheck::IntertwiningI { h: Profile::zeros(&s) };
    assert!(verify_identity(&alpha, &check).unwrap().pass);
}

#[test]
fn balayage_of_a_birth_death_chain() {
    // Λ = {1, 2} inside a path 0 - 1 - 2 - 3 with steps left/right of ½:
    // from 1 the walk exits at 0 with probability 2/3, at 3 with 1/3.
    let s = SiteSpace::indexed(4);
    let alpha = Kernel::new(&s, [(1, 0, 0.5), (1, 2, 0.5), (2, 1, 0.5), (2, 3, 0.5)]).unwrap();
    let lambda = SiteSet::from_indices(&s, [1, 2]).unwrap();
    let pi = balayage(&alpha, &lambda, &WeightVector::ones(&s), 1e-14, 10_000).unwrap();
    let m = pi.to_dense();
    let want = [[1.0, 0.0, 0.0, 0.0], [2.0 / 3.0, 0.0, 0.0, 1.0 / 3.0], [1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0], [
        0.0, 0.0, 0.0, 1.0,
    ]];
    for (x, row) in want.iter().enumerate() {
        for (y, v) in row.iter().enumerate() {
            assert!((m[(x, y)] - v).abs() <= 1e-13, "({x},{y}): {}", m[(x, y)]);
        }
    }
}

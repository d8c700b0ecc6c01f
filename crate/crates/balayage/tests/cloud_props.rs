//! Property tests for the cloud algebra: norms, the order `⊴`, class
//! cones, `Λ`-regularity and the operator comparison they imply.

use balayage::random::{random_cloud, random_fh_instance, random_subset};
use balayage::{
    classify, order_leq, realize, realize_left, single_marker_update, Cloud, Dyadic, Marker, Scalar, SiteSet,
    SiteSpace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grid(r: &mut ChaCha8Rng, n: usize) -> Vec<Dyadic> {
    (0..n).map(|_| Dyadic::from_f64(r.gen_range(0..=8) as f64 / 8.0).unwrap()).collect()
}

/// `a · β_f * β_g` with grid profiles and `a ∈ {1/2, 1, 3/2, 2}`: a
/// member of `𝒫 ⊆ ℛ` with branch supremum `a`.
fn scaled_beta_product(r: &mut ChaCha8Rng, space: &SiteSpace) -> (Cloud<Dyadic>, Dyadic) {
    let n = space.len();
    let b = Cloud::beta(space, &grid(r, n)).unwrap().convolve(&Cloud::beta(space, &grid(r, n)).unwrap()).unwrap();
    let a = Dyadic::from_f64(r.gen_range(1..=4) as f64 / 2.0).unwrap();
    (b.scale(&a), a)
}

fn rho1(space: &SiteSpace) -> Cloud<Dyadic> {
    Cloud::rho(space, 1).unwrap()
}

#[test]
fn norm_is_submultiplicative() {
    let mut r = rng(1);
    for _ in 0..500 {
        let space = SiteSpace::indexed(r.gen_range(1..=3));
        let a: Cloud<Dyadic> = random_cloud(&mut r, &space, 3, 6, true);
        let b: Cloud<Dyadic> = random_cloud(&mut r, &space, 3, 6, true);
        let ab = a.convolve(&b).unwrap().norm().unwrap().unwrap();
        let bound = a.norm().unwrap().unwrap().mul(&b.norm().unwrap().unwrap());
        assert!(ab <= bound, "{ab} > {bound}");
    }
}

#[test]
fn left_convolution_preserves_order() {
    let mut r = rng(2);
    for _ in 0..200 {
        let space = SiteSpace::indexed(r.gen_range(1..=3));
        let mu: Cloud<Dyadic> = random_cloud(&mut r, &space, 2, 5, false);
        let hi: Cloud<Dyadic> = random_cloud(&mut r, &space, 2, 5, false);
        // Mass raising: moving weight from a marker to its children lowers
        // the cumulative there and nowhere else.
        let lo = lower(&mut r, &hi);
        assert!(order_leq(&lo, &hi, 0).unwrap().holds);
        let (a, b) = (mu.convolve(&lo).unwrap(), mu.convolve(&hi).unwrap());
        assert!(order_leq(&a, &b, 0).unwrap().holds);
    }
}

/// A cloud `⊴ nu` obtained by mass raising at a random support marker.
fn lower(r: &mut ChaCha8Rng, nu: &Cloud<Dyadic>) -> Cloud<Dyadic> {
    let f = nu.map_scalar(|v| Ok(v.to_f64())).unwrap();
    let support: Vec<Marker> = f.entries().unwrap().keys().cloned().collect();
    if support.is_empty() {
        return nu.clone();
    }
    let eta = &support[r.gen_range(0..support.len())];
    let share = r.gen_range(0..=4) as f64 / 4.0;
    let moved = single_marker_update(&f, eta, f.value(eta) * share).unwrap();
    moved.map_scalar(|v| Dyadic::from_f64(*v)).unwrap()
}

#[test]
fn right_convolution_preserves_order_exactly_for_class_r() {
    let mut r = rng(3);
    let (mut inside, mut outside) = (0, 0);
    for i in 0..300 {
        let space = SiteSpace::indexed(r.gen_range(1..=3));
        let nu = if i % 2 == 0 {
            scaled_beta_product(&mut r, &space).0
        } else {
            random_cloud(&mut r, &space, 2, 4, false)
        };
        let in_r = classify(&nu, None).unwrap().in_r;
        // ρ^1 ⊴ ρ^0, so class ℛ is exactly what keeps ρ^1 * ν ⊴ ν.
        let kept = order_leq(&rho1(&space).convolve(&nu).unwrap(), &nu, 0).unwrap().holds;
        assert_eq!(in_r, kept, "{nu:?}");
        if in_r {
            inside += 1;
            let hi: Cloud<Dyadic> = random_cloud(&mut r, &space, 2, 4, false);
            let lo = lower(&mut r, &hi);
            let (a, b) = (lo.convolve(&nu).unwrap(), hi.convolve(&nu).unwrap());
            assert!(order_leq(&a, &b, 0).unwrap().holds);
        } else {
            outside += 1;
        }
    }
    assert!(inside > 50 && outside > 50, "{inside} / {outside}");
}

#[test]
fn class_cones_are_closed() {
    let mut r = rng(4);
    for _ in 0..100 {
        let space = SiteSpace::indexed(r.gen_range(1..=3));
        let (x, a) = scaled_beta_product(&mut r, &space);
        let (y, b) = scaled_beta_product(&mut r, &space);
        for c in [&x, &y] {
            let rep = classify(c, None).unwrap();
            assert!(rep.in_p && rep.in_r && rep.in_s);
        }
        let sum = classify(&x.add(&y).unwrap(), None).unwrap();
        assert!(sum.in_p && sum.in_r);
        let prod = classify(&x.convolve(&y).unwrap(), None).unwrap();
        assert!(prod.in_p && prod.in_r && prod.in_s);
        assert_eq!(prod.s_value, Some(a.mul(&b).to_f64()));
    }
}

#[test]
fn lambda_regularity() {
    let mut r = rng(5);
    for _ in 0..200 {
        let space = SiteSpace::indexed(r.gen_range(1..=4));
        let lambda = random_subset(&mut r, &space, false);
        let f = grid(&mut r, space.len());
        let beta = Cloud::beta(&space, &f).unwrap();
        let supported = f.iter().enumerate().all(|(x, v)| v.is_zero() || lambda.contains(x));
        let rep = classify(&beta, Some(&lambda)).unwrap();
        assert_eq!(rep.lambda_regular, Some(supported));
        if supported {
            let g: Vec<Dyadic> =
                (0..space.len()).map(|x| if lambda.contains(x) { grid(&mut r, 1)[0].clone() } else { Dyadic::zero() }).collect();
            let other = Cloud::beta(&space, &g).unwrap();
            let prod = classify(&beta.convolve(&other).unwrap(), Some(&lambda)).unwrap();
            assert_eq!(prod.lambda_regular, Some(true));
        }
    }
}

#[test]
fn order_implies_operator_comparison() {
    let mut r = rng(6);
    for _ in 0..200 {
        let n = r.gen_range(2..=5);
        let inst = random_fh_instance(&mut r, n).unwrap();
        let space = inst.kernel.space().clone();
        let hi: Cloud<Dyadic> = random_cloud(&mut r, &space, 3, 6, false);
        let mut lo = hi.clone();
        for _ in 0..3 {
            lo = lower(&mut r, &lo);
        }
        assert!(order_leq(&lo, &hi, 0).unwrap().holds);
        let w = inst.w.values();
        let (tl, th) = (realize(&lo, &inst.kernel).unwrap(), realize(&hi, &inst.kernel).unwrap());
        for x in 0..n {
            let a: f64 = (0..n).map(|y| tl[(x, y)] * w[y]).sum();
            let b: f64 = (0..n).map(|y| th[(x, y)] * w[y]).sum();
            assert!(a <= b * (1.0 + 1e-12) + 1e-14, "row {x}: {a} > {b}");
        }
        let c: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0)).collect();
        let norm = |v: Vec<f64>| v.iter().zip(w).map(|(a, b)| a.abs() * b).sum::<f64>();
        let (a, b) = (norm(realize_left(&c, &lo, &inst.kernel).unwrap()), norm(realize_left(&c, &hi, &inst.kernel).unwrap()));
        assert!(a <= b * (1.0 + 1e-12) + 1e-14);
    }
}

/// `sup_{ζ ≽ η} ν̃(ζ)`, enumerating descendants up to the level bound.
fn branch_sup(nu: &Cloud<Dyadic>, eta: &Marker, bound: usize) -> Dyadic {
    let mut best = nu.cumulative(eta);
    if eta.level() < bound {
        for y in 0..nu.space().len() {
            best = best.max_of(&branch_sup(nu, &eta.child(y), bound));
        }
    }
    best
}

#[test]
fn class_r_has_constant_branch_suprema() {
    let mut r = rng(7);
    let mut tested = 0;
    while tested < 40 {
        let space = SiteSpace::indexed(r.gen_range(1..=3));
        let nu: Cloud<Dyadic> = if tested % 2 == 0 {
            scaled_beta_product(&mut r, &space).0
        } else {
            random_cloud(&mut r, &space, 2, 4, false)
        };
        if !classify(&nu, None).unwrap().in_r {
            continue;
        }
        tested += 1;
        let bound = nu.level_bound().unwrap_or(0);
        let first = branch_sup(&nu, &Marker::single(0), bound);
        for _ in 0..100 {
            let len = r.gen_range(1..=bound + 2);
            let eta = Marker::new((0..len).map(|_| r.gen_range(0..space.len())).collect()).unwrap();
            assert_eq!(branch_sup(&nu, &eta, bound), first);
        }
    }
}

#[test]
fn regular_clouds_absorb_balayage() {
    let space = SiteSpace::indexed(3);
    let lambda = SiteSet::from_indices(&space, [0, 1]).unwrap();
    let half = Dyadic::pow2_neg(1);
    let beta = Cloud::beta(&space, &[half, Dyadic::one(), Dyadic::zero()]).unwrap();
    let pi = Cloud::<Dyadic>::balayage(&lambda);
    let lhs = beta.convolve(&pi).unwrap();
    let mut frontier = vec![Marker::single(0), Marker::single(1), Marker::single(2)];
    for _ in 0..5 {
        let mut next = Vec::new();
        for eta in frontier {
            assert_eq!(lhs.value(&eta), pi.value(&eta), "{eta:?}");
            next.extend((0..3).map(|y| eta.child(y)));
        }
        frontier = next;
    }
}

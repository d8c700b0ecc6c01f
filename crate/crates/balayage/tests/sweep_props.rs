//! Property tests for cleaning schedules, the slow and adversarial
//! constructions, single-marker updates and the planner.

use balayage::examples_gallery::{self, adversarial_stage_depth, run_adversarial_tree, Params, Sequence};
use balayage::random::{
    random_cleanable_subset, random_cloud, random_contraction_instance, random_dirt, random_fh_instance,
    random_kernel, random_profile, random_profile_below,
};
use balayage::{
    balayage, imitation_epsilon, plan_cleaning, realize_left, round_robin, run_scaled_schedule, run_schedule,
    single_marker_update, slow_schedule, Cloud, DirtVector, Marker, Profile, Schedule, SiteSet, SiteSpace,
    TreeSite,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn stronger_profiles_clean_better(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=7);
        let inst = random_fh_instance(&mut r, n).unwrap();
        let lambda = random_cleanable_subset(&mut r, &inst.kernel).unwrap();
        let c = random_dirt(&mut r, &SiteSet::full(inst.kernel.space()));
        let pi = balayage(&inst.kernel, &lambda, &inst.w, 1e-14, 1_000_000).unwrap();
        let steps = 30;
        let h: Vec<Profile> = (0..steps).map(|_| random_profile(&mut r, &lambda)).collect();
        let g: Vec<Profile> = h.iter().map(|p| random_profile_below(&mut r, p)).collect();
        let strong = run_schedule(&c, &Schedule::new(&lambda, h).unwrap(), &inst.kernel, &inst.w, steps, Some(&pi)).unwrap();
        let weak = run_schedule(&c, &Schedule::new(&lambda, g).unwrap(), &inst.kernel, &inst.w, steps, Some(&pi)).unwrap();
        let mass: f64 = c.values().iter().zip(inst.w.values()).map(|(a, b)| a * b).sum();
        for (s, w) in strong.records.iter().zip(&weak.records) {
            let (ds, dw) = (s.deviation.unwrap(), w.deviation.unwrap());
            prop_assert!(ds <= dw + 1e-12 * dw.max(1.0) + 2.0 * pi.tail_bound * mass, "step {}: {} > {}", s.n, ds, dw);
            prop_assert!(s.dirt_in_lambda <= w.dirt_in_lambda * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn single_marker_updates_are_single_site_sweeps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=5);
        let alpha = random_kernel(&mut r, n, 0.6, 1.0);
        let space = alpha.space().clone();
        let nu: Cloud<f64> = random_cloud(&mut r, &space, 3, 6, false);
        let support: Vec<Marker> = nu.entries().unwrap().keys().cloned().collect();
        prop_assume!(!support.is_empty());
        let eta = support[r.gen_range(0..support.len())].clone();
        let kappa = nu.value(&eta) * r.gen_range(0.0..=1.0);
        let c: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0)).collect();
        let eps = imitation_epsilon(&c, &nu, &eta, kappa, &alpha).unwrap();
        prop_assert!((0.0..=1.0).contains(&eps));
        let lhs = realize_left(&c, &single_marker_update(&nu, &eta, kappa).unwrap(), &alpha).unwrap();
        let mut rhs = realize_left(&c, &nu, &alpha).unwrap();
        let y = eta.last();
        let moved = eps * rhs[y];
        rhs[y] -= moved;
        for z in 0..n {
            rhs[z] += moved * alpha.get(y, z);
        }
        for (a, b) in lhs.iter().zip(&rhs) {
            prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn planner_reaches_its_tolerance(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=8);
        let inst = random_contraction_instance(&mut r, n, 2, 0.5).unwrap();
        let eps = [1e-2, 1e-4, 1e-6];
        let plan = plan_cleaning(&inst.c, &inst.w, &inst.kernel, &inst.lambda, &eps).unwrap();
        let trace = run_scaled_schedule(&inst.c, &plan.schedule, &inst.lambda, &inst.kernel, &inst.w, None).unwrap();
        let left = trace.last().map_or(0.0, |rec| rec.dirt_in_lambda);
        prop_assert!(left <= 2.0 * 1e-6 * (1.0 + 1e-9), "{}", left);
        let predicted = plan.stages.last().unwrap().predicted_dirt;
        prop_assert!((left - predicted).abs() <= 1e-9 * predicted.max(1e-6), "{} vs {}", left, predicted);
    }
}

/// The smallest `L` with `Σ_{ℓ=r}^{L} ρ/2 ≥ 10^r + ρ/2` for constant `ρ`.
fn stage_depth_oracle(rho: f64, r: u32) -> usize {
    let mut sum = 0.0;
    let mut l = r as usize;
    loop {
        sum += rho / 2.0;
        if sum >= 10f64.powi(r as i32) + rho / 2.0 {
            return l;
        }
        l += 1;
    }
}

#[test]
fn adversarial_stage_depths() {
    for rho in [1.0, 2.0, 0.5] {
        for r in 1..=3 {
            let got = adversarial_stage_depth(&Sequence::Constant(rho), r as usize, 1 << 20).unwrap();
            assert_eq!(got, stage_depth_oracle(rho, r), "ρ = {rho}, r = {r}");
        }
    }
    assert_eq!(stage_depth_oracle(1.0, 1), 21);
    assert_eq!(stage_depth_oracle(1.0, 2), 202);
    assert_eq!(stage_depth_oracle(1.0, 3), 2003);
}

#[test]
fn explicit_adversarial_tree_matches_implicit_run() {
    let g = examples_gallery::build("adversarial_tree", Params::parse(&["depth=21", "stages=21"]).unwrap()).unwrap();
    let inst = &g.instance;
    let run = run_adversarial_tree(&Sequence::Constant(1.0), 1, 21).unwrap();
    let stage = &run.stages[0];
    let lambda = inst.lambda.clone().unwrap_or_else(|| SiteSet::full(inst.space()));
    let schedule = Schedule::new(&lambda, inst.profiles.clone()).unwrap();
    let w = inst.weight_or_ones();
    let summits: Vec<usize> = (1..=21).map(|l| TreeSite::Node(l, l).index()).collect();
    let c = inst.c.as_ref().unwrap();
    let a = run_schedule(c, &schedule, &inst.kernel, &w, stage.steps_after_a, None).unwrap();
    let mass: f64 = summits.iter().map(|&x| a.final_dirt[x]).sum();
    assert!((mass - stage.summit_mass_after_a).abs() <= 1e-9 * mass, "{mass} vs {}", stage.summit_mass_after_a);
    assert!(mass >= 10.0);
}

#[test]
fn slow_schedule_beats_harmonic_targets() {
    let space = SiteSpace::indexed(16);
    let c = DirtVector::new(&space, (1..=16).map(|i| 0.5f64.powi(i)).collect()).unwrap();
    let delta: Vec<f64> = (0..=2000).map(|n| if n == 0 { 1.0 } else { 1.0 / n as f64 }).collect();
    let sl = slow_schedule(&c, &delta).unwrap();
    assert!(sl.check_chain(&c, &delta).is_none());
    for n in sl.thresholds[0]..=2000 {
        assert!(sl.epsilon(&c, n) >= delta[n], "N = {n}");
    }
}

#[test]
fn round_robin_decay_is_geometric() {
    // A uniform block-covering schedule on a strict contraction: the
    // logarithm of the deviation at block ends falls along a line.
    let mut r = rng(7);
    let inst = random_contraction_instance(&mut r, 8, 3, 0.7).unwrap();
    let lambda = &inst.lambda;
    let pi = balayage(&inst.kernel, lambda, &inst.w, 1e-15, 1_000_000).unwrap();
    let schedule = round_robin(lambda, 0.5).unwrap();
    let blocks = lambda.len();
    let trace = run_schedule(&inst.c, &schedule, &inst.kernel, &inst.w, 40 * blocks, Some(&pi)).unwrap();
    let points: Vec<(f64, f64)> = trace
        .records
        .iter()
        .filter(|rec| rec.n % blocks == 0)
        .map(|rec| ((rec.n / blocks) as f64, rec.deviation.unwrap()))
        .filter(|&(_, d)| d > 1e-12)
        .map(|(k, d)| (k, d.ln()))
        .collect();
    assert!(points.len() >= 5, "{points:?}");
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|(_, y)| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    assert!(slope < 0.0 && r2 > 0.9, "slope {slope}, r² {r2}");
}

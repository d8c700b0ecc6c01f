//! Throughput of the core operations: spectral radius, balayage, schedule
//! runs, cloud convolution and the adversarial tree.

use balayage::examples_gallery::{run_adversarial_tree, Sequence};
use balayage::random::random_cloud;
use balayage::{
    balayage, round_robin, run_schedule, spectral_radius, Cloud, Dyadic, SiteSpace, DEFAULT_SPR_MAX_ITER,
    DEFAULT_SPR_TOL,
};
use balayage_bench::fixture;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

const SIZES: [usize; 3] = [16, 64, 256];

fn bench_spectral_radius(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral_radius");
    for n in SIZES {
        let f = fixture(n, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| spectral_radius(black_box(&f.fh.kernel), DEFAULT_SPR_TOL, DEFAULT_SPR_MAX_ITER).unwrap())
        });
    }
    g.finish();
}

fn bench_balayage(c: &mut Criterion) {
    let mut g = c.benchmark_group("balayage");
    for n in SIZES {
        let f = fixture(n, 2);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| balayage(black_box(&f.fh.kernel), &f.lambda, &f.fh.w, 1e-10, 100_000).unwrap())
        });
    }
    g.finish();
}

fn bench_round_robin(c: &mut Criterion) {
    let mut g = c.benchmark_group("round_robin_200_steps");
    for n in SIZES {
        let f = fixture(n, 3);
        let schedule = round_robin(&f.lambda, 1.0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| run_schedule(black_box(&f.c), &schedule, &f.fh.kernel, &f.fh.w, 200, None).unwrap())
        });
    }
    g.finish();
}

fn bench_cloud_convolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("cloud_convolution");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for sites in [2usize, 3] {
        let space = SiteSpace::indexed(sites);
        let a: Cloud<Dyadic> = random_cloud(&mut rng, &space, 3, 12, true);
        let b2: Cloud<Dyadic> = random_cloud(&mut rng, &space, 3, 12, true);
        g.bench_function(BenchmarkId::from_parameter(sites), |b| {
            b.iter(|| black_box(&a).convolve(black_box(&b2)).unwrap())
        });
    }
    g.finish();
}

fn bench_adversarial_tree(c: &mut Criterion) {
    let mut g = c.benchmark_group("adversarial_tree");
    g.sample_size(10);
    for stages in [1usize, 2, 3] {
        g.bench_function(BenchmarkId::from_parameter(stages), |b| {
            b.iter(|| run_adversarial_tree(&Sequence::Constant(1.0), stages, 10_000).unwrap())
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    bench_spectral_radius,
    bench_balayage,
    bench_round_robin,
    bench_cloud_convolution,
    bench_adversarial_tree
);
criterion_main!(benches);

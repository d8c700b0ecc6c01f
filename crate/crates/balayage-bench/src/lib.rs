//! Fixtures shared by the benchmarks: seeded random instances of a given
//! size, so every run measures the same inputs.

use balayage::random::{random_cleanable_subset, random_fh_instance, FhInstance};
use balayage::{DirtVector, SiteSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A kernel with a subinvariant weight, a cleanable region and unit dirt
/// on that region.
pub struct Fixture {
    /// Kernel and weight.
    pub fh: FhInstance,
    /// Region whose block has spectral radius below 1.
    pub lambda: SiteSet,
    /// `χ_Λ`.
    pub c: DirtVector,
}

/// The fixture with `n` sites drawn from `seed`.
pub fn fixture(n: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fh = random_fh_instance(&mut rng, n).expect("random instances are valid");
    let lambda = random_cleanable_subset(&mut rng, &fh.kernel).expect("a cleanable region exists");
    let space = fh.kernel.space().clone();
    let c = DirtVector::new(&space, (0..n).map(|x| if lambda.contains(x) { 1.0 } else { 0.0 }).collect())
        .expect("nonnegative dirt");
    Fixture { fh, lambda, c }
}

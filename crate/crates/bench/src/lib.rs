//! Seeded inputs shared by the benchmarks.

use std::sync::Arc;

use powerdomain::testkit;
use powerdomain::{Poset, SimpleValuation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` comparable-or-not pairs on random posets of at most `size` elements.
pub fn order_pairs(seed: u64, count: usize, size: usize, exp: u32) -> Vec<(SimpleValuation, SimpleValuation)> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let p = Arc::new(testkit::random_poset(&mut rng, size));
            testkit::random_pair(&mut rng, &p, exp)
        })
        .collect()
}

/// A chain of `n` elements and a probability valuation on it.
pub fn chain_target(seed: u64, n: usize, exp: u32) -> SimpleValuation {
    let c = Arc::new(testkit::fixtures::chain(n));
    testkit::random_probability(&mut rng(seed), &c, exp)
}

/// A probability target on the diamond.
pub fn diamond_target(seed: u64, exp: u32) -> SimpleValuation {
    let p: Arc<Poset> = Arc::new(testkit::fixtures::m4());
    testkit::random_probability(&mut rng(seed), &p, exp)
}

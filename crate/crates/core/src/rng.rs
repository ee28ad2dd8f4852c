//! Seeded, splittable random streams.
//!
//! Every draw sequence is cut into fixed-size blocks; block `b` is produced by
//! a ChaCha8 generator seeded with `seed` on stream `b`. Output therefore
//! depends only on `(seed, n)`, whatever the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const BLOCK: usize = 4096;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `n` values of `draw`, generated block-wise in parallel.
pub fn generate<T, F>(seed: u64, n: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let blocks: Vec<Vec<T>> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let len = BLOCK.min(n - b * BLOCK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    blocks.into_iter().flatten().collect()
}

//! Seeded randomness. Every stream is ChaCha8 keyed by a master seed, with the
//! replica index selecting the stream, so results do not depend on thread
//! scheduling or platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type WalkRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> WalkRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn replica_rng(master: u64, replica: u64) -> WalkRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(replica);
    rng
}

/// Runs `f` on replicas `0..count` in parallel; output is in replica order.
pub fn run_replicas<T, F>(master: u64, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut WalkRng) -> T + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(master, i);
            f(i, &mut rng)
        })
        .collect()
}

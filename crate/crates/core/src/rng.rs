//! Seeded random streams.
//!
//! Every random choice goes through ChaCha8 seeded with the run seed; distinct
//! trials use distinct stream numbers of the same seed, so trials can run in
//! any order and still reproduce.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream number for trial `trial` of the cell `(r, n)` in a sweep.
pub fn cell_stream(r: usize, n: usize, trial: usize) -> u64 {
    ((r as u64) << 48) | ((n as u64) << 32) | trial as u64
}

//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, stream, counter)`, so a value can be
//! regenerated in isolation and parallel consumers never share state.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A generator positioned at the start of `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The `counter`-th `u64` of `stream`, without generating its predecessors.
pub fn draw_u64(seed: u64, stream_id: u64, counter: u64) -> u64 {
    let mut rng = stream(seed, stream_id);
    rng.set_word_pos(2 * counter as u128);
    rng.next_u64()
}

/// Uniform in `[0, 1)` built from the top 53 bits of a `u64`.
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The `counter`-th uniform of `stream`.
pub fn draw_uniform(seed: u64, stream_id: u64, counter: u64) -> f64 {
    unit_f64(draw_u64(seed, stream_id, counter))
}

/// Uniform integer in `0..n` from the given stream (rejection free for n a power of two).
pub fn draw_index(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.random_range(0..n)
}

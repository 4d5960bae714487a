//! Seeded substreams for parallel sampling.
//!
//! Each chunk of work gets its own ChaCha8 stream id under a common seed, so
//! the values drawn for a chunk depend only on `(seed, chunk)` and never on
//! scheduling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Samples per substream chunk.
pub const CHUNK: usize = 1 << 16;

/// Generator for chunk `chunk` under `seed`.
pub fn substream(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Chunk boundaries `[start, end)` covering `0..n`.
pub fn chunks(n: usize) -> impl Iterator<Item = (u64, usize, usize)> + Clone {
    (0..n.div_ceil(CHUNK)).map(move |c| (c as u64, c * CHUNK, ((c + 1) * CHUNK).min(n)))
}

/// Uniform `u64` words.
pub fn fill_u64(rng: &mut ChaCha8Rng, out: &mut [u64]) {
    for x in out {
        *x = rng.next_u64();
    }
}

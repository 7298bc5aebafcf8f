//! Reproducible random streams.
//!
//! Every stream is ChaCha8 (`rand_chacha`) keyed with
//! `ChaCha8Rng::seed_from_u64(seed)` and positioned on stream number
//! `index`. ChaCha output is specified bit-for-bit, so a `(seed, index)` pair
//! yields the same values on every platform, and distinct indices give
//! independent streams. The corpus pipeline uses `index` = attempt number,
//! which makes the corpus independent of how attempts are spread across
//! worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SnippetRng = ChaCha8Rng;

/// Seed used when the caller does not choose one.
pub const DEFAULT_SEED: u64 = 0x7153_2024;

/// The `index`-th independent stream derived from `seed`.
pub fn stream(seed: u64, index: u64) -> SnippetRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

//! Seeded random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`]. A run is
//! identified by a 64-bit seed, and independent work items (one candidate,
//! one class, one repeat stage) each get their own ChaCha stream of that seed:
//! `ChaCha8Rng::seed_from_u64(seed)` followed by `set_stream(item_index)`.
//! Streams never overlap, so evaluating items in parallel or serially yields
//! identical draws.

use rand::{RngCore, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

/// Generator for the `stream`-th independent stream of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A seed derived from `seed` for a named sub-task, e.g. one class of a
/// one-vs-rest run. Equal inputs give equal outputs on every platform.
pub fn child_seed(seed: u64, stream: u64) -> u64 {
    stream_rng(seed, stream).next_u64()
}

//! Seeded counter-based random streams.
//!
//! Every independent task (a sampled case, a simulated path) gets its own
//! ChaCha8 stream `(seed, index)`, so results do not depend on scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw on `[0, 1)` with 53 random bits.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw on `[lo, hi)`.
pub fn uniform_in<R: RngCore + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Exponential variate with the given rate, by inversion.
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -libm::log1p(-uniform(rng)) / rate
}

/// Uniform integer in `0..n`.
pub fn below<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    ((uniform(rng) * n as f64) as u64).min(n.saturating_sub(1))
}

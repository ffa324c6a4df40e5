//! Deterministic random streams.
//!
//! Every random quantity in a simulation comes from a [`SimRng`] derived from a
//! master seed and a stream id, so results never depend on thread scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream ids used within one trial.
pub mod streams {
    pub const SCHEDULE: u64 = 0;
    pub const CODING: u64 = 1;
    pub const MESSAGE: u64 = 2;
    pub const APERTURE: u64 = 3;
}

/// ChaCha8 keyed by `seed`, positioned on `stream`.
///
/// Distinct stream ids under one seed produce independent sequences.
pub fn stream(seed: u64, stream_id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one seed. Order-sensitive and stable.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C909, |acc, &p| mix64(acc ^ mix64(p)))
}

/// 64-bit FNV-1a, used to turn labels into seed material.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01B3)
    })
}

/// Uniform index in `[0, n)` from exactly one draw (multiply-high, bias below `n / 2^64`).
#[inline]
pub fn uniform_index<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    ((u128::from(rng.next_u64()) * n as u128) >> 64) as usize
}

//! Seeded randomness.
//!
//! Every random object in the crate is a pure function of its parameters and a
//! 64-bit seed. The generator is xoshiro256++ seeded through SplitMix64 (the
//! reference seeding procedure), and the derived draws are spelled out here so
//! that another implementation can reproduce matrices and noise bit for bit:
//!
//! * a unit draw is `(next_u64 >> 11) * 2^-53`, uniform on `[0, 1)`;
//! * a Bernoulli(p) draw is `unit < p`;
//! * a uniform index below `n` is the high word of `next_u64 * n` (128-bit
//!   multiply-shift).
//!
//! Independent streams are carved out of one master seed with
//! [`derive_seed`], which returns the `(index + 1)`-th output of SplitMix64
//! started at the master seed. It is counter based, so trial `k` can be
//! regenerated without touching trials `0..k`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The crate's PRNG.
#[derive(Debug, Clone)]
pub struct GtRng(Xoshiro256PlusPlus);

impl GtRng {
    pub fn new(seed: u64) -> Self {
        GtRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform index in `0..n`. `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

/// Counter-based seed splitter: the `(index + 1)`-th SplitMix64 output for the
/// stream started at `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let state = master.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA));
    SplitMix64::seed_from_u64(state).next_u64()
}

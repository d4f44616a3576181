//! Reproducible per-trial random streams.
//!
//! Every trial owns an independent stream whose starting state is the
//! SplitMix64 finalizer applied to `mix64(master_seed) ^ trial_index`. The
//! seed is mixed first: with a raw `master_seed ^ trial_index`, seeds that
//! differ only in low bits permute the same set of streams, so any
//! order-free aggregate (a histogram, a hit count) would not change. The stream
//! itself is a SplitMix64 sequence: add `0x9E3779B97F4A7C15`, then finalize
//! with the multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`
//! (shifts 30, 27, 31). A trial's outcome therefore depends only on
//! `(master_seed, trial_index)`, never on worker count or scheduling.

use serde::Serialize;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream index reserved for drawing the random subset of a run, so that
/// it never coincides with a trial stream.
pub const SUBSET_STREAM: u64 = u64::MAX;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RngSpec {
    pub master_seed: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn stream(&self, trial_index: u64) -> Stream {
        Stream {
            state: mix64(mix64(self.master_seed) ^ trial_index),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
}

impl Stream {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform integer in `[0, bound)` reduced from 128 random bits, so the
    /// bias is below `bound / 2^128`.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let wide = (u128::from(self.next_u64()) << 64) | u128::from(self.next_u64());
        (wide % u128::from(bound)) as u64
    }
}

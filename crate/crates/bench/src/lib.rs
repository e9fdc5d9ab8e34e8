//! Fixed inputs shared by the benchmarks.

use stochan::random::{random_channel, seeded_rng};
use stochan::Channel;

pub const SEED: u64 = 7;

/// A reproducible full-rank random channel in dimension `d`.
pub fn channel(d: usize) -> Channel {
    random_channel(&mut seeded_rng(SEED + d as u64), d, d * d)
}

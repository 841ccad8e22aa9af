//! Channel model and deterministic randomness.
//!
//! Channels are real, i.i.d. `N(0, 1)` per transmitter. Every Monte Carlo
//! trial owns an [`RngStream`] keyed by `(master_seed, lane, stream_index)`,
//! so any trial can be replayed in isolation and trials can run in any order.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Transmit power `P` on a linear scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerConfig(f64);

impl PowerConfig {
    pub fn new(power: f64) -> Result<Self> {
        if power > 0.0 && power.is_finite() {
            Ok(PowerConfig(power))
        } else {
            Err(Error::InvalidPower(power))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Real channel gains from the `L` transmitters to one relay.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(Vec<f64>);

impl ChannelVector {
    /// Wraps `entries`. The all-zero vector is accepted here; operations that
    /// need a non-degenerate channel check for it themselves.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDimension);
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ChannelVector(entries))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    /// Index of the largest-magnitude gain, smallest index on exact ties.
    pub fn strongest(&self) -> usize {
        let mut best = 0;
        for (i, x) in self.0.iter().enumerate().skip(1) {
            if x.abs() > self.0[best].abs() {
                best = i;
            }
        }
        best
    }

    pub(crate) fn require_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::DegenerateChannel)
        } else {
            Ok(())
        }
    }
}

/// A reproducible random stream.
///
/// Backed by ChaCha8 with the 256-bit key built from `master_seed` and
/// `lane` (little-endian, remaining bytes zero) and the ChaCha stream id set
/// to `stream_index`. The map from `(master_seed, lane, stream_index)` to the
/// generator state is injective. Normal variates use the Ziggurat sampler of
/// `rand_distr::StandardNormal`.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    lane: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, lane: u64, stream_index: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&lane.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream_index);
        RngStream {
            master_seed,
            lane,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn lane(&self) -> u64 {
        self.lane
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Child stream for trial `trial_index` of a campaign seeded with `master_seed`.
pub fn derive_trial_stream(master_seed: u64, trial_index: u64) -> RngStream {
    RngStream::new(master_seed, 0, trial_index)
}

/// Draws `users` i.i.d. standard-normal gains.
pub fn sample_channel(users: usize, rng: &mut RngStream) -> Result<ChannelVector> {
    if users == 0 {
        return Err(Error::InvalidDimension);
    }
    let entries = (0..users).map(|_| rng.standard_normal()).collect();
    Ok(ChannelVector(entries))
}

/// Mixes campaign parameters into a lane id (SplitMix64 finalizer chain).
pub fn lane_id(parts: &[u64]) -> u64 {
    let mut state = 0x243f_6a88_85a3_08d3u64;
    for &p in parts {
        state = splitmix64(state ^ p);
    }
    state
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

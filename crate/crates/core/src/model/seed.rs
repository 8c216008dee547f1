//! Seed derivation.
//!
//! Every random stream is derived from a 64-bit parent seed and a stream
//! label with the SplitMix64 finalizer:
//!
//! ```text
//! derive(parent, label) = mix64(parent ^ mix64(label + 0x9E3779B97F4A7C15))
//! ```
//!
//! Replication `r` of an experiment uses `derive(master, r)`, so appending
//! replications never changes the seeds of existing ones. Within a trial the
//! deployment, slice assignment, fading and solver restarts each draw from
//! their own labelled stream, so changing one never perturbs the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_DEPLOY: u64 = 0x6465_706c_6f79;
pub const STREAM_SLICE: u64 = 0x73_6c69_6365;
pub const STREAM_FADING: u64 = 0x6661_6469_6e67;
pub const STREAM_SOLVER: u64 = 0x736f_6c76_6572;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(parent: u64, label: u64) -> u64 {
    mix64(parent ^ mix64(label.wrapping_add(GOLDEN)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// FNV-1a style accumulator used to seed solver restarts from an instance.
#[derive(Debug, Clone, Copy)]
pub struct InstanceHasher(u64);

impl Default for InstanceHasher {
    fn default() -> Self {
        InstanceHasher(0xcbf2_9ce4_8422_2325)
    }
}

impl InstanceHasher {
    pub fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    /// Hashes `v` quantized to 1e-9 so that values equal up to rounding
    /// noise hash identically.
    pub fn write_f64(&mut self, v: f64) {
        self.write_u64((v * 1e9).round() as i64 as u64);
    }

    pub fn finish(&self) -> u64 {
        mix64(self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_streams_differ() {
        let a = derive(42, STREAM_DEPLOY);
        let b = derive(42, STREAM_SLICE);
        let c = derive(43, STREAM_DEPLOY);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive(42, STREAM_DEPLOY));
    }

    #[test]
    fn hasher_ignores_rounding_noise() {
        let mut h1 = InstanceHasher::default();
        let mut h2 = InstanceHasher::default();
        h1.write_f64(0.1 + 0.2);
        h2.write_f64(0.3);
        assert_eq!(h1.finish(), h2.finish());
    }
}

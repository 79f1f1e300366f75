//! Counter-based random numbers.
//!
//! Every random quantity in the crate is addressed by a `(seed, stream)` pair: the seed
//! becomes the Philox key and the stream id (an edge, a site, a prime index, a replica)
//! occupies the high half of the counter. Two code paths that ask for the same address
//! see the same numbers regardless of traversal order, which is what lets the streaming
//! and dense branching-random-walk samplers agree bit for bit.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = (a as u64) * (b as u64);
    ((p >> 32) as u32, p as u32)
}

/// Philox4x32 with 10 rounds.
#[inline]
pub fn philox4x32(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = ctr;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// Bijective 64-bit finalizer (SplitMix64).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Per-replica seed derived from a master seed.
///
/// `r -> mix64(master + (r + 1) * GOLDEN_GAMMA)` is a composition of bijections of `u64`
/// (multiplication by an odd constant, translation, and the SplitMix64 finalizer), so two
/// distinct replica indices can never receive the same seed.
#[inline]
pub fn replica_seed(master: u64, replica: u64) -> u64 {
    mix64(master.wrapping_add(replica.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Derives an independent seed for a named sub-experiment (e.g. one value of `n` in a sweep).
#[inline]
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    mix64(mix64(master ^ 0x6C6F_6763_6F72_0000) ^ tag.wrapping_mul(GOLDEN_GAMMA))
}

/// A random stream at address `(seed, stream)`; successive outputs walk the low counter half.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: [u32; 2],
    stream: u64,
    block: u64,
    buf: [u64; 2],
    used: usize,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            key: [seed as u32, (seed >> 32) as u32],
            stream,
            block: 0,
            buf: [0; 2],
            used: 2,
        }
    }

    #[inline]
    fn refill(&mut self) {
        let out = philox4x32(
            [
                self.block as u32,
                (self.block >> 32) as u32,
                self.stream as u32,
                (self.stream >> 32) as u32,
            ],
            self.key,
        );
        self.block = self.block.wrapping_add(1);
        self.buf = [
            (out[0] as u64) | ((out[1] as u64) << 32),
            (out[2] as u64) | ((out[3] as u64) << 32),
        ];
        self.used = 0;
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`; safe to take the logarithm of.
    #[inline]
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.next_u64() as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        if self.used == 2 {
            self.refill();
        }
        let v = self.buf[self.used];
        self.used += 1;
        v
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

/// Two independent standard normals at address `(seed, stream)`.
#[inline]
pub fn normal_pair(seed: u64, stream: u64) -> (f64, f64) {
    let mut rng = CounterRng::new(seed, stream);
    let a = rng.normal();
    let b = rng.normal();
    (a, b)
}

/// One standard normal at address `(seed, stream)`.
#[inline]
pub fn normal_at(seed: u64, stream: u64) -> f64 {
    CounterRng::new(seed, stream).normal()
}

/// One uniform on `[0, 1)` at address `(seed, stream)`.
#[inline]
pub fn uniform_at(seed: u64, stream: u64) -> f64 {
    CounterRng::new(seed, stream).uniform()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    // Known-answer vectors published with the Random123 reference implementation.
    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32([0, 0, 0, 0], [0, 0]),
            [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]
        );
        assert_eq!(
            philox4x32([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]
        );
        assert_eq!(
            philox4x32(
                [0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344],
                [0xa409_3822, 0x299f_31d0]
            ),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn same_address_same_numbers() {
        let mut a = CounterRng::new(7, 99);
        let mut b = CounterRng::new(7, 99);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_ne!(normal_at(7, 99), normal_at(7, 100));
        assert_ne!(normal_at(7, 99), normal_at(8, 99));
    }

    #[test]
    fn replica_seeds_never_collide() {
        for master in [0u64, 1, 42, u64::MAX] {
            let seeds: HashSet<u64> = (0..100_000).map(|r| replica_seed(master, r)).collect();
            assert_eq!(seeds.len(), 100_000);
        }
    }

    #[test]
    fn uniform_moments() {
        let mut rng = CounterRng::new(3, 0);
        let n = 200_000;
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..n {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
            s += u;
            s2 += u * u;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((mean - 0.5).abs() < 4.0 * (1.0f64 / 12.0 / n as f64).sqrt());
        assert!((var - 1.0 / 12.0).abs() < 1e-3);
    }

    #[test]
    fn normal_moments() {
        let n = 200_000u64;
        let xs: Vec<f64> = (0..n).map(|i| normal_at(11, i)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt());
    }
}

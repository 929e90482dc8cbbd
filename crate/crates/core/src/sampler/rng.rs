//! Per-p-bit Xoshiro256++ streams.
//!
//! Stream `i` is the master-seeded generator advanced by `i` long jumps
//! (2^192 steps each), so streams never overlap and a p-bit's sequence depends
//! only on the master seed and its index.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type PbitRng = Xoshiro256PlusPlus;

pub fn pbit_streams(seed: u64, n: usize) -> Vec<PbitRng> {
    let mut streams = Vec::with_capacity(n);
    let mut current = PbitRng::seed_from_u64(seed);
    for _ in 0..n {
        streams.push(current.clone());
        current.long_jump();
    }
    streams
}

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64(rng: &mut PbitRng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform 32-bit word, the hardware comparator input.
#[inline]
pub fn unit_u32(rng: &mut PbitRng) -> u32 {
    (rng.next_u64() >> 32) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = pbit_streams(5, 3);
        let mut b = pbit_streams(5, 3);
        let xs: Vec<u64> = a.iter_mut().map(|r| r.next_u64()).collect();
        let ys: Vec<u64> = b.iter_mut().map(|r| r.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs[0], xs[1]);
        assert_ne!(xs[1], xs[2]);
    }

    #[test]
    fn advancing_one_stream_leaves_others() {
        let mut a = pbit_streams(9, 2);
        let mut b = pbit_streams(9, 2);
        for _ in 0..100 {
            a[0].next_u64();
        }
        assert_eq!(a[1].next_u64(), b[1].next_u64());
    }

    #[test]
    fn unit_f64_in_range() {
        let mut r = PbitRng::seed_from_u64(1);
        for _ in 0..10_000 {
            let x = unit_f64(&mut r);
            assert!((0.0..1.0).contains(&x));
        }
    }
}

//! Seeded, splittable random streams and uniform sampling on the unit sphere.
//!
//! A [`RandomStream`] is a `(seed, stream_index)` pair. The seed is expanded
//! into a ChaCha8 key and the index selects the ChaCha stream, so every pair
//! maps to its own independent, reproducible sequence. Monte Carlo drivers
//! give each trial the child stream `master.split(trial_index)`, which makes
//! results independent of how trials are distributed over workers.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5146_1E75;

/// `+1` for `x >= 0`, `-1` otherwise. Non-finite input is rejected.
pub fn sgn<T: Real>(x: T) -> Result<i8> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x.as_f64()));
    }
    Ok(sign_of(x))
}

/// Unchecked [`sgn`]; callers guarantee finiteness.
#[inline]
pub(crate) fn sign_of<T: Real>(x: T) -> i8 {
    debug_assert!(x.is_finite());
    if x >= T::zero() {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_index: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            stream_index: 0,
        }
    }

    /// Child stream `index` of this stream. Siblings are independent; the
    /// child depends only on `(self, index)`.
    pub fn split(&self, index: u64) -> Self {
        let mut state = self.seed ^ 0xA076_1D64_78BD_642F;
        let a = splitmix64(&mut state);
        let mut state = self.stream_index.wrapping_add(a);
        let child_seed = splitmix64(&mut state) ^ a.rotate_left(17);
        Self {
            seed: child_seed,
            stream_index: index,
        }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut state = self.seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Convenience wrapper for [`RandomStream::split`].
pub fn split_stream(stream: &RandomStream, index: u64) -> RandomStream {
    stream.split(index)
}

/// Uniform point on the unit sphere: `z` uniform on `[-1, 1]`, azimuth
/// uniform on `[0, 2pi)`. Archimedes' hat-box theorem makes this exactly
/// area-uniform.
pub fn sample_direction<T: Real, R: RngCore + ?Sized>(rng: &mut R) -> Direction<T> {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let z = 2.0 * u - 1.0;
    let phi = std::f64::consts::TAU * v;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    Direction::from_components_unchecked(T::of(r * c), T::of(r * s), T::of(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgn_examples() {
        assert_eq!(sgn(0.0f64), Ok(1));
        assert_eq!(sgn(-0.0f64), Ok(1));
        assert_eq!(sgn(-0.3f64), Ok(-1));
        assert_eq!(sgn(2.5f64), Ok(1));
        assert!(sgn(f64::NAN).is_err());
        assert!(sgn(f64::INFINITY).is_err());
    }

    #[test]
    fn sgn_of_sgn_is_positive_for_non_negative() {
        for x in [0.0, 1e-300, 0.5, 7.0f64] {
            let s = sgn(x).unwrap();
            assert_eq!(sgn(f64::from(s)).unwrap(), 1);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let s = RandomStream::new(42);
        let a: Vec<u64> = (0..5).map({
            let mut g = s.split(3).generator();
            move |_| g.next_u64()
        }).collect();
        let b: Vec<u64> = (0..5).map({
            let mut g = split_stream(&s, 3).generator();
            move |_| g.next_u64()
        }).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn sibling_streams_differ() {
        let s = RandomStream::new(42);
        let mut g0 = s.split(0).generator();
        let mut g1 = s.split(1).generator();
        let a: Vec<u64> = (0..4).map(|_| g0.next_u64()).collect();
        let b: Vec<u64> = (0..4).map(|_| g1.next_u64()).collect();
        assert_ne!(a, b);
        assert_ne!(s.split(0).generator().next_u64(), s.generator().next_u64());
        assert_ne!(
            RandomStream::new(1).split(0).generator().next_u64(),
            RandomStream::new(2).split(0).generator().next_u64()
        );
    }

    #[test]
    fn samples_are_unit() {
        let mut g = RandomStream::new(7).generator();
        for _ in 0..10_000 {
            let d: Direction<f64> = sample_direction(&mut g);
            assert!((d.norm() - 1.0).abs() <= 1e-9);
        }
    }
}

//! Seeded randomness. Every randomized procedure derives its stream from a
//! user seed through the same chain: `derive_seed` mixes (seed, index) with
//! SplitMix64 and the result keys a ChaCha8 stream. Restart i of a multistart
//! run always sees the same stream no matter how restarts are scheduled.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{real, Scalar};

/// SplitMix64 mix of a base seed and a stream index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index))
}

/// Standard normal via Box–Muller.
pub fn standard_normal<F: Scalar>(rng: &mut ChaCha8Rng) -> F {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    real((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
}

/// Complex standard-normal vector, unnormalized.
pub fn gaussian_vector<F: Scalar>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex<F>> {
    (0..dim)
        .map(|_| Complex::new(standard_normal(rng), standard_normal(rng)))
        .collect()
}

/// Haar-like random unit vector (normalized complex Gaussian).
pub fn unit_vector<F: Scalar>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex<F>> {
    crate::linalg::normalize(&gaussian_vector(rng, dim))
}

/// Uniform phases in [0, 2π).
pub fn phases<F: Scalar>(rng: &mut ChaCha8Rng, count: usize) -> Vec<F> {
    (0..count)
        .map(|_| real(rng.gen_range(0.0..2.0 * std::f64::consts::PI)))
        .collect()
}

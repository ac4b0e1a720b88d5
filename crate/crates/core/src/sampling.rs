//! Seeded complex Gaussian sampling.
//!
//! Child streams are keyed by `(master_seed, index)` through a SplitMix64
//! finalizer, so a draw depends only on its index and never on scheduling.
//! Normals come from the Box–Muller transform, one uniform pair per complex
//! sample.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer applied to `master ^ golden·(index + 1)`.
pub fn mix_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(master_seed, index))
}

/// Draw in `(0, 1]`.
fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `CN(0, variance)`: real and imaginary parts independent `N(0, variance/2)`.
pub fn complex_normal<R: RngCore + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let u1 = open_unit(rng);
    let u2 = open_unit(rng);
    let radius = (-2.0 * u1.ln()).sqrt() * (0.5 * variance).sqrt();
    Complex64::from_polar(radius, 2.0 * PI * u2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn child_streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| child_rng(7, 3).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(child_rng(7, 3).next_u64(), child_rng(7, 4).next_u64());
        assert_ne!(child_rng(7, 3).next_u64(), child_rng(8, 3).next_u64());
    }

    #[test]
    fn complex_normal_moments() {
        let mut rng = child_rng(1, 0);
        let n = 200_000;
        let draws: Vec<Complex64> = (0..n).map(|_| complex_normal(&mut rng, 2.0)).collect();
        let power = draws.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        let re2 = draws.iter().map(|z| z.re * z.re).sum::<f64>() / n as f64;
        let cross = draws.iter().map(|z| z.re * z.im).sum::<f64>() / n as f64;
        assert!((power - 2.0).abs() < 0.03);
        assert!((re2 - 1.0).abs() < 0.02);
        assert!(cross.abs() < 0.01);
    }
}

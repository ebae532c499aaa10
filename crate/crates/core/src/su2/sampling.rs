use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Direction;

/// Deterministic generator used across the crate (ChaCha8 with a 64-bit seed).
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Isotropic direction: `cos θ` uniform on `[-1, 1]`, `φ` uniform on `[0, 2π)`.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let cos_theta: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = TAU * rng.random::<f64>();
    Direction::new(cos_theta.clamp(-1.0, 1.0).acos(), phi).expect("sampled angles in range")
}

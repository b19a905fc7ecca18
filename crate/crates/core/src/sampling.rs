//! Seeded uniform sampling in Euclidean balls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Vector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the closed ball `B[center, radius]`.
pub fn in_ball<R: Rng>(rng: &mut R, center: &Vector, radius: f64) -> Vector {
    let n = center.len();
    let mut dir = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let norm = dir.norm();
    if norm == 0.0 {
        return center.clone();
    }
    dir /= norm;
    let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
    center + dir * r
}

//! Seeded sample generation shared by the verification routines.
//!
//! Samples are always drawn sequentially from one generator, so a seed fixes
//! the sample set regardless of how the evaluation is later parallelized.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::DomainSpec;
use crate::point::{CPoint, CTangent};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derived seed for an independent stream (e.g. measuring vs verifying).
pub fn substream(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17)
}

/// `count` points `z` with gauge at most `max_gauge`, each with a unit vector `v`.
pub fn point_vector_pairs(domain: &DomainSpec, count: usize, max_gauge: f64, seed: u64) -> Vec<(CPoint, CTangent)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let z = domain.sample_interior(&mut r, max_gauge);
            let v = domain.sample_direction(&mut r);
            (z, v)
        })
        .collect()
}

/// Points with two unit vectors each.
pub fn point_vector_triples(
    domain: &DomainSpec,
    count: usize,
    max_gauge: f64,
    seed: u64,
) -> Vec<(CPoint, CTangent, CTangent)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let z = domain.sample_interior(&mut r, max_gauge);
            let x = domain.sample_direction(&mut r);
            let y = domain.sample_direction(&mut r);
            (z, x, y)
        })
        .collect()
}

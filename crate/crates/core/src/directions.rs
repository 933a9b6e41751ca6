//! Deterministic low-discrepancy direction sets on the unit sphere of R^{2n} = C^n.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::point::{CTangent, C64};

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    r
}

/// `count` unit vectors in C^n from a Halton sequence pushed through the Gaussian
/// inverse CDF and normalized. The set is fixed for given `(n, count)`.
pub fn sphere_directions(n: usize, count: usize) -> Vec<CTangent> {
    assert!(2 * n <= PRIMES.len(), "direction sets support n <= 8");
    let normal = Normal::standard();
    let mut out = Vec::with_capacity(count);
    let mut i: u64 = 1;
    while out.len() < count {
        let x: Vec<f64> = (0..2 * n)
            .map(|d| {
                let u = radical_inverse(i, PRIMES[d]).clamp(1e-12, 1.0 - 1e-12);
                normal.inverse_cdf(u)
            })
            .collect();
        i += 1;
        let nrm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nrm < 1e-9 {
            continue;
        }
        out.push(CTangent::new(
            x.chunks(2).map(|p| C64::new(p[0] / nrm, p[1] / nrm)).collect(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit_and_deterministic() {
        let a = sphere_directions(2, 256);
        let b = sphere_directions(2, 256);
        assert_eq!(a, b);
        for d in &a {
            assert!((d.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn directions_are_roughly_balanced() {
        let dirs = sphere_directions(2, 4096);
        let mut mean = [0.0; 4];
        for d in &dirs {
            for (m, x) in mean.iter_mut().zip(d.to_real_pairs()) {
                *m += x / dirs.len() as f64;
            }
        }
        for m in mean {
            assert!(m.abs() < 0.02, "{m}");
        }
    }
}

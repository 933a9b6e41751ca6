//! Nearest and farthest boundary points of a real axis-aligned ellipsoid
//! `sum x_k^2 / b_k^2 = 1`, via the Lagrange secular equation in the multiplier.

use crate::optim::bisect_root;

fn secular(y: &[f64], b: &[f64], mu: f64, skip: &[bool]) -> f64 {
    y.iter()
        .zip(b)
        .zip(skip)
        .filter(|(_, &s)| !s)
        .map(|((yk, bk), _)| {
            let q = yk * bk * bk / (bk * bk + mu);
            q * q / (bk * bk)
        })
        .sum::<f64>()
        - 1.0
}

fn distance_for(y: &[f64], b: &[f64], mu: f64) -> f64 {
    y.iter()
        .zip(b)
        .map(|(yk, bk)| {
            let x = yk * bk * bk / (bk * bk + mu);
            (x - yk) * (x - yk)
        })
        .sum::<f64>()
        .sqrt()
}

/// Shared solver: `extreme` is `b_min` (nearest) or `b_max` (farthest).
fn solve(y: &[f64], b: &[f64], nearest: bool) -> f64 {
    let extreme = if nearest {
        b.iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        b.iter().cloned().fold(0.0, f64::max)
    };
    let e2 = extreme * extreme;
    let on_extreme: Vec<bool> = b.iter().map(|bk| (bk - extreme).abs() <= 1e-14 * extreme).collect();
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tiny = 1e-300;
    let extreme_mass: f64 = y
        .iter()
        .zip(&on_extreme)
        .filter(|(_, &e)| e)
        .map(|(v, _)| v * v)
        .sum();
    // Limit of the secular function at mu -> -extreme^2 with the extreme-axis terms dropped.
    let limit = secular(y, b, -e2, &on_extreme);
    if extreme_mass > tiny || limit >= 0.0 {
        let g = |mu: f64| secular(y, b, mu, &vec![false; b.len()]);
        let mu = if nearest {
            let lo = -e2 * (1.0 - 1e-16);
            bisect_root(g, lo, 0.0, 1e-15 * e2)
        } else {
            let lo = -e2 - 2.0 * ynorm * extreme - e2 - 1.0;
            let hi = -e2 * (1.0 + 1e-16);
            bisect_root(g, lo, hi, 1e-15 * e2.max(1.0))
        };
        return distance_for(y, b, mu);
    }
    // Degenerate branch: the free extreme-axis components absorb the remaining mass.
    let mut d2 = 0.0;
    let mut used = 0.0;
    for ((yk, bk), &e) in y.iter().zip(b).zip(&on_extreme) {
        if e {
            continue;
        }
        let x = yk * bk * bk / (bk * bk - e2);
        d2 += (x - yk) * (x - yk);
        used += x * x / (bk * bk);
    }
    d2 += (1.0 - used).max(0.0) * e2;
    d2.sqrt()
}

/// Euclidean distance from an interior point `y` to the ellipsoid boundary.
pub fn nearest_boundary_distance(semiaxes: &[f64], y: &[f64]) -> f64 {
    solve(y, semiaxes, true)
}

/// Largest distance from `y` to a point of the closed ellipsoid.
pub fn farthest_boundary_distance(semiaxes: &[f64], y: &[f64]) -> f64 {
    solve(y, semiaxes, false)
}

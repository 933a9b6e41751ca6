//! Quadrature rules used by the kernel builder.

use gauss_quad::legendre::GaussLegendre;

/// Gauss–Legendre nodes and weights on `[0, 1]`; weights sum to 1.
pub fn gauss_legendre_unit(m: usize) -> Vec<(f64, f64)> {
    if m <= 1 {
        return vec![(0.5, 1.0)];
    }
    let rule = GaussLegendre::new(m).expect("degree >= 2");
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

/// Rule on the simplex `{y >= 0, y_1 + ... + y_n = 1}` in collapsed coordinates.
///
/// Weights are with respect to Lebesgue measure in `(y_1, ..., y_{n-1})`, so they
/// sum to `1 / (n-1)!`. With `m` points per axis, polynomials of degree
/// `2m - 1` are integrated exactly.
pub fn simplex_rule(n: usize, m: usize) -> Vec<(Vec<f64>, f64)> {
    if n == 1 {
        return vec![(vec![1.0], 1.0)];
    }
    let g = gauss_legendre_unit(m);
    let mut out = vec![(Vec::<f64>::new(), 1.0, 1.0)]; // (partial coords, weight, remaining mass)
    for _ in 0..n - 1 {
        let mut next = Vec::with_capacity(out.len() * g.len());
        for (coords, w, rest) in &out {
            for &(u, wu) in &g {
                let mut c = coords.clone();
                c.push(rest * u);
                // dy_k = rest du; the remaining mass shrinks by (1-u).
                next.push((c, w * wu * rest, rest * (1.0 - u)));
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(mut c, w, rest)| {
            c.push(rest);
            (c, w)
        })
        .collect()
}

/// Equispaced angles on the torus `[0, 2π)^n`, `m` per axis (trapezoid rule).
pub fn torus_angles(n: usize, m: usize) -> Vec<Vec<f64>> {
    let step = std::f64::consts::TAU / m as f64;
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * m);
        for a in &out {
            for j in 0..m {
                let mut b: Vec<f64> = a.clone();
                b.push(j as f64 * step);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_rule_integrates_polynomials() {
        let g = gauss_legendre_unit(5);
        let s: f64 = g.iter().map(|(x, w)| w * x.powi(9)).sum();
        assert!((s - 0.1).abs() < 1e-14);
    }

    #[test]
    fn simplex_moments() {
        // ∫_Δ y^α = α! / (|α| + n - 1)! for the (n-1)-dimensional measure.
        let r = simplex_rule(3, 6);
        let total: f64 = r.iter().map(|(_, w)| w).sum();
        assert!((total - 0.5).abs() < 1e-14);
        let m: f64 = r.iter().map(|(y, w)| w * y[0] * y[1].powi(2) * y[2].powi(3)).sum();
        let expect = 1.0 * 2.0 * 6.0 / (2..=8).map(|k| k as f64).product::<f64>();
        assert!((m - expect).abs() < 1e-15, "{m} vs {expect}");
    }

    #[test]
    fn torus_count() {
        assert_eq!(torus_angles(2, 4).len(), 16);
    }
}

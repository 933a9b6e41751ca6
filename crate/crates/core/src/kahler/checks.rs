use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{quad, CurvatureTensor, KahlerMetricField};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::point::{check_nonzero, CPoint, CTangent, C64};
use crate::sampling::point_vector_triples;

/// `R(X, X̄, X, X̄) / h(X, X)^2` (Bergman normalization; twice this is the
/// Gaussian normalization in which the Poincaré disk has curvature -4).
pub fn hsc_of_tensor(t: &CurvatureTensor, h: &DMatrix<C64>, x: &[C64]) -> f64 {
    let hx = quad(h, x, x).re;
    t.holomorphic(x) / (hx * hx)
}

pub fn hsc(field: &dyn KahlerMetricField, z: &CPoint, x: &CTangent) -> Result<f64> {
    check_nonzero(x)?;
    let jet = field.metric_jet(z)?;
    let t = CurvatureTensor::from_jet(&jet)?;
    Ok(hsc_of_tensor(&t, &jet.h, &x.coords))
}

/// Value together with the h-orthonormal pair actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSectional {
    pub value: f64,
    pub x: CTangent,
    pub y: CTangent,
}

/// Complex Gram-Schmidt of `(X, Y)` in the metric `h`.
pub fn orthonormalize(h: &DMatrix<C64>, x: &[C64], y: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
    let nx = quad(h, x, x).re.sqrt();
    if !(nx > 0.0) {
        return Err(Error::Degenerate("degenerate plane: X = 0".into()));
    }
    let e1: Vec<C64> = x.iter().map(|c| c / nx).collect();
    let proj = quad(h, y, &e1);
    let y2: Vec<C64> = y.iter().zip(&e1).map(|(b, a)| b - proj * a).collect();
    let ny = quad(h, &y2, &y2).re.sqrt();
    let ny0 = quad(h, y, y).re.sqrt();
    if !(ny > 1e-10 * ny0.max(f64::MIN_POSITIVE)) {
        return Err(Error::Degenerate("degenerate plane: X and Y are complex-dependent".into()));
    }
    Ok((e1, y2.iter().map(|c| c / ny).collect()))
}

/// `2R(X,X̄,Y,Ȳ) - R(X,Ȳ,X,Ȳ) - R(Y,X̄,Y,X̄)` for the orthonormalized pair;
/// this is `R(u1, u2, u2, u1)` for the real vectors `u1 = X + X̄`, `u2 = Y + Ȳ`.
pub fn real_sectional_of_tensor(t: &CurvatureTensor, x: &[C64], y: &[C64]) -> C64 {
    t.eval(x, x, y, y) * 2.0 - t.eval(x, y, x, y) - t.eval(y, x, y, x)
}

pub fn real_sectional(field: &dyn KahlerMetricField, z: &CPoint, x: &CTangent, y: &CTangent) -> Result<RealSectional> {
    let jet = field.metric_jet(z)?;
    let t = CurvatureTensor::from_jet(&jet)?;
    let (e1, e2) = orthonormalize(&jet.h, &x.coords, &y.coords)?;
    let v = real_sectional_of_tensor(&t, &e1, &e2);
    Ok(RealSectional { value: v.re, x: CTangent::new(e1), y: CTangent::new(e2) })
}

/// Relative residuals of the four polarization identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationResiduals {
    /// `X ± Y` sum identity.
    pub plus_minus: f64,
    /// `X ± iY` sum identity.
    pub plus_minus_i: f64,
    /// Sixteenth-combination formula for `R(X,X̄,Y,Ȳ)`.
    pub mixed: f64,
    /// Quarter-combination formula for `R(X,Ȳ,X,Ȳ) + R(Y,X̄,Y,X̄)`.
    pub bisectional: f64,
}

impl PolarizationResiduals {
    pub fn max(&self) -> f64 {
        self.plus_minus.max(self.plus_minus_i).max(self.mixed).max(self.bisectional)
    }
}

fn rel(lhs: C64, rhs: C64, terms: &[C64]) -> f64 {
    let scale = terms.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return (lhs - rhs).norm();
    }
    (lhs - rhs).norm() / scale
}

/// Evaluates both sides of each identity independently and reports the
/// differences relative to the largest term.
pub fn polarization_check(t: &CurvatureTensor, x: &[C64], y: &[C64]) -> PolarizationResiduals {
    let comb = |s: C64| -> Vec<C64> { x.iter().zip(y).map(|(a, b)| a + s * b).collect() };
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let hol = |v: &[C64]| t.eval(v, v, v, v);
    let p = hol(&comb(one));
    let m = hol(&comb(-one));
    let pi = hol(&comb(i));
    let mi = hol(&comb(-i));
    let xx = hol(x);
    let yy = hol(y);
    let xy = t.eval(x, x, y, y);
    let a = t.eval(x, y, x, y);
    let b = t.eval(y, x, y, x);

    let rhs2 = xx * 2.0 + yy * 2.0 + xy * 8.0 + a * 2.0 + b * 2.0;
    let rhs3 = xx * 2.0 + yy * 2.0 + xy * 8.0 - a * 2.0 - b * 2.0;
    let all = [p, m, pi, mi, xx * 2.0, yy * 2.0, xy * 8.0, a * 2.0, b * 2.0];
    let rhs4 = (p + m + pi + mi - xx * 4.0 - yy * 4.0) / 16.0;
    let rhs5 = (p + m - pi - mi) / 4.0;
    PolarizationResiduals {
        plus_minus: rel(p + m, rhs2, &all),
        plus_minus_i: rel(pi + mi, rhs3, &all),
        mixed: rel(xy, rhs4, &[xy, p / 16.0, m / 16.0, pi / 16.0, mi / 16.0, xx / 4.0, yy / 4.0]),
        bisectional: rel(a + b, rhs5, &[a, b, p / 4.0, m / 4.0, pi / 4.0, mi / 4.0]),
    }
}

/// Maxima over samples of the quantities bounded in terms of the holomorphic pinching constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinchingReport {
    pub samples: usize,
    pub seed: u64,
    /// Max sampled `|hsc|` (Bergman normalization).
    pub c: f64,
    pub max_mixed: f64,
    pub max_bisectional: f64,
    pub max_real_sectional: f64,
    /// Observed `max |real_sectional| / C`.
    pub observed_ratio: f64,
    pub mixed_ok: bool,
    pub bisectional_ok: bool,
    pub real_sectional_ok: bool,
    pub worst_point: Option<CPoint>,
}

impl PinchingReport {
    pub fn pass(&self) -> bool {
        self.mixed_ok && self.bisectional_ok && self.real_sectional_ok
    }
}

struct PinchSample {
    c: f64,
    mixed: f64,
    bisect: f64,
    real_sec: f64,
    tensor_scale: f64,
}

/// Samples `(z, X, Y)` with `X, Y` h-orthonormal, measures `C = max |hsc|` over the
/// polarized directions and extra random directions, and checks the 5C/2, 8C and
/// 13C bounds with tolerance `1e-8 C`.
pub fn pinching_constants_check(
    field: &dyn KahlerMetricField,
    domain: &DomainSpec,
    max_gauge: f64,
    sample_count: usize,
    seed: u64,
) -> Result<PinchingReport> {
    let triples = point_vector_triples(domain, sample_count, max_gauge, seed);
    let extra = crate::directions::sphere_directions(domain.dim(), 32);
    let evals: Vec<Result<PinchSample>> = triples
        .par_iter()
        .map(|(z, x, y)| {
            let jet = field.metric_jet(z)?;
            let t = CurvatureTensor::from_jet(&jet)?;
            let (e1, e2) = if domain.dim() == 1 {
                // No second direction in one dimension: the plane is degenerate.
                let n1 = quad(&jet.h, &x.coords, &x.coords).re.sqrt();
                let e = x.coords.iter().map(|c| c / n1).collect::<Vec<_>>();
                (e.clone(), vec![C64::new(0.0, 0.0)])
            } else {
                orthonormalize(&jet.h, &x.coords, &y.coords)?
            };
            let mut c: f64 = 0.0;
            let i = C64::new(0.0, 1.0);
            for s in [C64::new(1.0, 0.0), -C64::new(1.0, 0.0), i, -i] {
                let w: Vec<C64> = e1.iter().zip(&e2).map(|(a, b)| a + s * b).collect();
                if w.iter().any(|q| q.norm_sqr() > 0.0) {
                    c = c.max(hsc_of_tensor(&t, &jet.h, &w).abs());
                }
            }
            c = c.max(hsc_of_tensor(&t, &jet.h, &e1).abs());
            if e2.iter().any(|q| q.norm_sqr() > 0.0) {
                c = c.max(hsc_of_tensor(&t, &jet.h, &e2).abs());
            }
            for d in &extra {
                c = c.max(hsc_of_tensor(&t, &jet.h, &d.coords).abs());
            }
            let mixed = t.eval(&e1, &e1, &e2, &e2).norm();
            let bisect = (t.eval(&e1, &e2, &e1, &e2) + t.eval(&e2, &e1, &e2, &e1)).norm();
            let real_sec = real_sectional_of_tensor(&t, &e1, &e2).norm();
            let tensor_scale = t.components().iter().map(|q| q.norm()).fold(0.0, f64::max);
            Ok(PinchSample { c, mixed, bisect, real_sec, tensor_scale })
        })
        .collect();
    let mut samples = Vec::with_capacity(evals.len());
    for e in evals {
        samples.push(e?);
    }
    let c = samples.iter().map(|s| s.c).fold(0.0, f64::max);
    let tensor_scale = samples.iter().map(|s| s.tensor_scale).fold(0.0, f64::max);
    if c == 0.0 && tensor_scale > 1e-12 {
        return Err(Error::Degenerate(
            "zero holomorphic sectional curvature with a nonzero curvature tensor".into(),
        ));
    }
    let argmax = |f: &dyn Fn(&PinchSample) -> f64| {
        samples
            .iter()
            .enumerate()
            .max_by(|a, b| f(a.1).total_cmp(&f(b.1)))
            .map(|(i, s)| (i, f(s)))
            .unwrap_or((0, 0.0))
    };
    let (_, max_mixed) = argmax(&|s| s.mixed);
    let (_, max_bisect) = argmax(&|s| s.bisect);
    let (worst, max_real) = argmax(&|s| s.real_sec);
    let tol = 1e-8 * c;
    Ok(PinchingReport {
        samples: sample_count,
        seed,
        c,
        max_mixed,
        max_bisectional: max_bisect,
        max_real_sectional: max_real,
        observed_ratio: if c > 0.0 { max_real / c } else { 0.0 },
        mixed_ok: max_mixed <= 2.5 * c + tol,
        bisectional_ok: max_bisect <= 8.0 * c + tol,
        real_sectional_ok: max_real <= 13.0 * c + tol,
        worst_point: triples.get(worst).map(|t| t.0.clone()),
    })
}

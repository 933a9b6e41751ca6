//! Lower bounds for the squeezing function from explicit embeddings into the unit ball.
//!
//! Affine embeddings `f(w) = A (w - z)` are optimized for every convex domain.
//! Balls and complex ellipsoids additionally get the exact witness
//! `φ_a ∘ Λ`, a diagonal scaling onto the ball followed by the ball
//! automorphism moving `Λ z` to the origin, which certifies `s = 1`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::directions::sphere_directions;
use crate::error::{Error, Result};
use crate::geometry::{ConvexOracle, DomainKind, DomainSpec};
use crate::optim::nelder_mead;
use crate::point::{inner, norm_sqr, CPoint, CTangent, C64};
use crate::sampling::rng;

pub const DEFAULT_BUDGET: usize = 500;
/// Directions used inside the optimizer loop; the final witness is re-certified more finely.
const OPT_DIRECTIONS: usize = 256;
const CERT_DIRECTIONS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `f(w) = A (w - z)`; `matrix` is row-major `(re, im)` pairs.
    Affine { matrix: Vec<Vec<[f64; 2]>>, translation: Vec<[f64; 2]> },
    /// `f(w) = φ_a(Λ w)` with `Λ = diag(scale)` and `a = Λ z`.
    BallAutomorphism { scale: Vec<f64>, center: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SqueezeMethod {
    /// `d(z) / R(z)` with `f(w) = (w - z) / R(z)`.
    InscribedEnclosing,
    AffineOptimized,
    BallAutomorphism,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingEstimate {
    pub point: CPoint,
    pub lower: f64,
    pub witness: Witness,
    pub method: SqueezeMethod,
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|x| [x.re, x.im]).collect()
}

fn unpairs(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}

fn matrix_pairs(a: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect()).collect()
}

fn matrix_from_pairs(m: &[Vec<[f64; 2]>]) -> DMatrix<C64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| C64::new(m[i][j][0], m[i][j][1]))
}

/// `φ_a(w) = (a - P_a w - s_a Q_a w) / (1 - <w, a>)`, an involutive automorphism of the unit ball.
pub fn ball_automorphism(a: &[C64], w: &[C64]) -> Vec<C64> {
    let aa = norm_sqr(a);
    if aa == 0.0 {
        return w.iter().map(|x| -x).collect();
    }
    let s = (1.0 - aa).sqrt();
    let wa = inner(w, a);
    let denom = C64::new(1.0, 0.0) - wa;
    let p: Vec<C64> = a.iter().map(|x| x * (wa / aa)).collect();
    a.iter().zip(w).zip(&p).map(|((ai, wi), pi)| (ai - pi - (wi - pi) * s) / denom).collect()
}

impl Witness {
    pub fn apply(&self, w: &[C64]) -> Vec<C64> {
        match self {
            Witness::Affine { matrix, translation } => {
                let a = matrix_from_pairs(matrix);
                let t = unpairs(translation);
                let x = DVector::from_iterator(w.len(), w.iter().zip(&t).map(|(p, q)| p - q));
                (a * x).iter().copied().collect()
            }
            Witness::BallAutomorphism { scale, center } => {
                let y: Vec<C64> = w.iter().zip(scale).map(|(x, s)| x * s).collect();
                ball_automorphism(&unpairs(center), &y)
            }
        }
    }

    pub fn invert(&self, y: &[C64]) -> Result<Vec<C64>> {
        match self {
            Witness::Affine { matrix, translation } => {
                let a = matrix_from_pairs(matrix);
                let inv = a.try_inverse().ok_or_else(|| Error::Degenerate("singular affine witness".into()))?;
                let x = inv * DVector::from_column_slice(y);
                Ok(x.iter().zip(unpairs(translation)).map(|(p, q)| p + q).collect())
            }
            Witness::BallAutomorphism { scale, center } => {
                let w = ball_automorphism(&unpairs(center), y);
                Ok(w.iter().zip(scale).map(|(x, s)| x / s).collect())
            }
        }
    }
}

fn check_interior(domain: &DomainSpec, z: &CPoint) -> Result<()> {
    if !domain.contains(z)? {
        return Err(Error::Domain(format!("point outside {}", domain.label())));
    }
    Ok(())
}

/// `d(z) / R(z)` with witness `(w - z) / R(z)`.
pub fn affine_squeeze_lower(domain: &DomainSpec, z: &CPoint) -> Result<SqueezingEstimate> {
    check_interior(domain, z)?;
    let d = domain.boundary_distance(z)?;
    let r = domain.enclosing_radius(z)?;
    let n = domain.dim();
    let a = DMatrix::<C64>::identity(n, n) * C64::new(1.0 / r, 0.0);
    Ok(SqueezingEstimate {
        point: z.clone(),
        lower: (d / r).min(1.0),
        witness: Witness::Affine { matrix: matrix_pairs(&a), translation: pairs(&z.coords) },
        method: SqueezeMethod::InscribedEnclosing,
    })
}

/// Exact witness for balls and complex ellipsoids, `None` otherwise.
pub fn automorphism_squeeze(domain: &DomainSpec, z: &CPoint) -> Result<Option<SqueezingEstimate>> {
    check_interior(domain, z)?;
    let scale: Vec<f64> = match domain.kind() {
        DomainKind::Ball { radius } => vec![1.0 / radius; domain.dim()],
        DomainKind::ComplexEllipsoid { semiaxes } => semiaxes.iter().map(|a| 1.0 / a).collect(),
        _ => return Ok(None),
    };
    let center: Vec<C64> = z.coords.iter().zip(&scale).map(|(x, s)| x * s).collect();
    Ok(Some(SqueezingEstimate {
        point: z.clone(),
        lower: 1.0,
        witness: Witness::BallAutomorphism { scale, center: pairs(&center) },
        method: SqueezeMethod::BallAutomorphism,
    }))
}

/// `A(D - z)` as a convex body around the origin.
#[derive(Debug)]
struct AffineImage {
    domain: DomainSpec,
    z: CPoint,
    a_adj: DMatrix<C64>,
    a_inv: DMatrix<C64>,
}

impl AffineImage {
    fn new(domain: &DomainSpec, z: &CPoint, a: &DMatrix<C64>) -> Option<Self> {
        let a_inv = a.clone().try_inverse()?;
        Some(Self { domain: domain.clone(), z: z.clone(), a_adj: a.adjoint(), a_inv })
    }
}

impl ConvexOracle for AffineImage {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn gauge(&self, y: &[C64]) -> f64 {
        let v: Vec<C64> = (&self.a_inv * DVector::from_column_slice(y)).iter().copied().collect();
        if norm_sqr(&v) == 0.0 {
            return 0.0;
        }
        match self.domain.ray_exit(&self.z, &CTangent::new(v)) {
            Ok(t) if t > 0.0 => 1.0 / t,
            _ => f64::INFINITY,
        }
    }

    fn support(&self, u: &[C64]) -> f64 {
        let au: Vec<C64> = (&self.a_adj * DVector::from_column_slice(u)).iter().copied().collect();
        self.domain.support(&au) - inner(&self.z.coords, &au).re
    }
}

/// Inscribed over enclosing radius of `A(D - z)` about the origin on a direction set.
fn sampled_ratio(domain: &DomainSpec, z: &CPoint, a: &DMatrix<C64>, dirs: &[CTangent]) -> (f64, f64) {
    let adj = a.adjoint();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for u in dirs {
        let au: Vec<C64> = (&adj * u.to_dvector()).iter().copied().collect();
        let h = domain.support(&au) - inner(&z.coords, &au).re;
        lo = lo.min(h);
        hi = hi.max(h);
    }
    (lo, hi)
}

fn unpack(x: &[f64], n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |i, j| C64::new(x[2 * (i * n + j)], x[2 * (i * n + j) + 1]))
}

/// Certified inscribed and enclosing radii of `A(D - z)` with local refinement.
fn certify(domain: &DomainSpec, z: &CPoint, a: &DMatrix<C64>) -> Result<(f64, f64)> {
    let img = AffineImage::new(domain, z, a).ok_or_else(|| Error::Degenerate("singular affine map".into()))?;
    let spec = DomainSpec::convex_with_directions(Arc::new(img), CERT_DIRECTIONS)?;
    let origin = CPoint::zeros(domain.dim());
    Ok((spec.boundary_distance(&origin)?, spec.enclosing_radius(&origin)?))
}

/// Best lower bound over affine embeddings, plus the exact automorphism witness where one exists.
///
/// Never fails on an infeasible or degenerate optimizer run: the simple
/// inscribed/enclosing witness is returned instead.
pub fn squeeze_optimize(domain: &DomainSpec, z: &CPoint, budget: usize, seed: u64) -> Result<SqueezingEstimate> {
    if budget == 0 {
        return Err(Error::Input("budget must be at least 1".into()));
    }
    let simple = affine_squeeze_lower(domain, z)?;
    if let Some(exact) = automorphism_squeeze(domain, z)? {
        return Ok(exact);
    }
    let n = domain.dim();
    let dirs = sphere_directions(n, OPT_DIRECTIONS);
    let objective = |x: &[f64]| {
        let a = unpack(x, n);
        let (lo, hi) = sampled_ratio(domain, z, &a, &dirs);
        if !(lo > 0.0 && hi.is_finite()) {
            return 1.0;
        }
        -(lo / hi)
    };
    let mut x0 = vec![0.0; 2 * n * n];
    for i in 0..n {
        x0[2 * (i * n + i)] = 1.0;
    }
    // The seed jitters the restart simplex so distinct seeds explore differently.
    let mut r = rng(seed);
    let mut best = nelder_mead(objective, &x0, 0.2, budget, 1e-13);
    for _ in 0..2 {
        let start: Vec<f64> = best.x.iter().map(|v| v + 0.02 * (rand::Rng::random::<f64>(&mut r) - 0.5)).collect();
        let run = nelder_mead(objective, &start, 0.05, budget, 1e-13);
        if run.value < best.value {
            best = run;
        }
    }
    let a = unpack(&best.x, n);
    let certified = certify(domain, z, &a);
    match certified {
        Ok((inscribed, enclosing)) if inscribed > 0.0 && enclosing.is_finite() => {
            let lower = (inscribed / enclosing).min(1.0);
            if lower > simple.lower {
                let a = a * C64::new(1.0 / enclosing, 0.0);
                return Ok(SqueezingEstimate {
                    point: z.clone(),
                    lower,
                    witness: Witness::Affine { matrix: matrix_pairs(&a), translation: pairs(&z.coords) },
                    method: SqueezeMethod::AffineOptimized,
                });
            }
        }
        _ => log::warn!("affine squeeze optimization degenerate at {:?}; using the simple witness", z.coords),
    }
    Ok(simple)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pattern", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridSpec {
    /// `rays` fixed directions, `steps` gauge levels `extent * k / steps`, `k = 0..steps`.
    Radial { rays: usize, steps: usize, extent: f64 },
    /// Cartesian lattice in `R^{2n}` with `count` points per axis over `[-R, R]`,
    /// `R` the sup norm, kept where the gauge is below `extent`.
    Lattice { count: usize, extent: f64 },
}

impl GridSpec {
    pub fn points(&self, domain: &DomainSpec) -> Result<Vec<CPoint>> {
        let n = domain.dim();
        let pts = match self {
            GridSpec::Radial { rays, steps, extent } => {
                if !(*extent > 0.0 && *extent < 1.0) || *steps == 0 || *rays == 0 {
                    return Err(Error::Input("radial grid needs rays, steps >= 1 and extent in (0, 1)".into()));
                }
                let mut out = vec![CPoint::zeros(n)];
                for u in sphere_directions(n, *rays) {
                    let g = domain.gauge(&u.coords);
                    for k in 1..*steps {
                        let t = extent * k as f64 / *steps as f64 / g;
                        out.push(CPoint::new(u.coords.iter().map(|x| x * t).collect()));
                    }
                }
                out
            }
            GridSpec::Lattice { count, extent } => {
                if !(*extent > 0.0 && *extent < 1.0) || *count < 2 {
                    return Err(Error::Input("lattice grid needs count >= 2 and extent in (0, 1)".into()));
                }
                let r = domain.sup_norm();
                let axis: Vec<f64> = (0..*count).map(|k| -r + 2.0 * r * k as f64 / (*count - 1) as f64).collect();
                let mut out = Vec::new();
                let total = count.pow(2 * n as u32);
                for mut idx in 0..total {
                    let mut x = Vec::with_capacity(2 * n);
                    for _ in 0..2 * n {
                        x.push(axis[idx % count]);
                        idx /= count;
                    }
                    let p = CPoint::from_real_pairs(&x);
                    if domain.gauge(&p.coords) < *extent {
                        out.push(p);
                    }
                }
                out
            }
        };
        Ok(pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingConstantReport {
    pub lower: f64,
    pub argmin: CPoint,
    pub estimates: Vec<SqueezingEstimate>,
}

/// Infimum of `squeeze_optimize` over explicit grid points.
pub fn squeezing_constant_over(domain: &DomainSpec, points: &[CPoint], budget: usize, seed: u64) -> Result<SqueezingConstantReport> {
    if points.is_empty() {
        return Err(Error::Input("empty grid".into()));
    }
    for z in points {
        check_interior(domain, z)?;
    }
    let estimates: Vec<SqueezingEstimate> = points
        .par_iter()
        .enumerate()
        .map(|(i, z)| squeeze_optimize(domain, z, budget, crate::sampling::substream(seed, i as u64)))
        .collect::<Result<_>>()?;
    let (k, lower) = estimates
        .iter()
        .enumerate()
        .map(|(k, e)| (k, e.lower))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    Ok(SqueezingConstantReport { lower, argmin: points[k].clone(), estimates })
}

pub fn squeezing_constant_lower(domain: &DomainSpec, grid: &GridSpec, budget: usize, seed: u64) -> Result<SqueezingConstantReport> {
    squeezing_constant_over(domain, &grid.points(domain)?, budget, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    /// Largest `|f(w)|` over sampled boundary points.
    pub max_image_norm: f64,
    /// Largest gauge of `f^{-1}(y)` over sampled `|y| = lower`.
    pub max_preimage_gauge: f64,
    pub pass: bool,
}

/// Sampling check that `f(D) ⊂ B` and `B(0, lower) ⊂ f(D)`.
pub fn verify_witness(domain: &DomainSpec, est: &SqueezingEstimate, samples: usize, seed: u64, tol: f64) -> Result<WitnessCheck> {
    let mut r = rng(seed);
    let zero = est.witness.apply(&est.point.coords);
    if norm_sqr(&zero).sqrt() > tol {
        return Ok(WitnessCheck { max_image_norm: f64::NAN, max_preimage_gauge: f64::NAN, pass: false });
    }
    let mut max_image: f64 = 0.0;
    let mut max_pre: f64 = 0.0;
    for _ in 0..samples {
        let w = domain.sample_boundary(&mut r);
        max_image = max_image.max(norm_sqr(&est.witness.apply(&w.coords)).sqrt());
        let u = domain.sample_direction(&mut r);
        let y: Vec<C64> = u.coords.iter().map(|x| x * (est.lower / u.norm())).collect();
        max_pre = max_pre.max(domain.gauge(&est.witness.invert(&y)?));
    }
    Ok(WitnessCheck {
        max_image_norm: max_image,
        max_preimage_gauge: max_pre,
        pass: max_image <= 1.0 + tol && max_pre <= 1.0 + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexFamily, PowerEllipsoid};
    use crate::point::c;

    #[test]
    fn simple_bound_examples() {
        let e = affine_squeeze_lower(&DomainSpec::unit_ball(2), &CPoint::zeros(2)).unwrap();
        assert_eq!(e.lower, 1.0);
        for n in 1..=3 {
            let p = DomainSpec::polydisk(vec![1.0; n]).unwrap();
            let e = affine_squeeze_lower(&p, &CPoint::zeros(n)).unwrap();
            assert!((e.lower - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
        }
        let e = affine_squeeze_lower(&DomainSpec::unit_disk(), &CPoint::from_real(&[0.5])).unwrap();
        assert!((e.lower - 1.0 / 3.0).abs() < 1e-12);
        assert!(affine_squeeze_lower(&DomainSpec::unit_disk(), &CPoint::from_real(&[1.5])).is_err());
    }

    #[test]
    fn automorphism_witness_is_valid() {
        let e = DomainSpec::ellipsoid(vec![1.0, 2.0]).unwrap();
        let z = CPoint::new(vec![c(0.3, -0.2), c(0.9, 0.7)]);
        let est = squeeze_optimize(&e, &z, 10, 1).unwrap();
        assert_eq!(est.lower, 1.0);
        let chk = verify_witness(&e, &est, 2000, 3, 1e-9).unwrap();
        assert!(chk.pass, "{chk:?}");
        let back = est.witness.invert(&est.witness.apply(&z.coords)).unwrap();
        assert!(back.iter().zip(&z.coords).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn optimizer_finds_diagonal_scaling() {
        // Same ellipsoid hidden behind the generic oracle: only the affine search can find s = 1.
        let e = DomainSpec::convex(Arc::new(PowerEllipsoid::new(vec![1.0, 2.0], 1.0).unwrap())).unwrap();
        let est = squeeze_optimize(&e, &CPoint::zeros(2), DEFAULT_BUDGET, 9).unwrap();
        assert_eq!(est.method, SqueezeMethod::AffineOptimized);
        assert!((est.lower - 1.0).abs() < 1e-6, "{}", est.lower);
        assert!(verify_witness(&e, &est, 2000, 4, 1e-9).unwrap().pass);
    }

    #[test]
    fn polydisk_optimizer_respects_floor() {
        let p = DomainSpec::polydisk(vec![1.0, 1.0]).unwrap();
        let z = CPoint::zeros(2);
        let simple = affine_squeeze_lower(&p, &z).unwrap();
        let est = squeeze_optimize(&p, &z, DEFAULT_BUDGET, 2).unwrap();
        assert!(est.lower >= simple.lower - 1e-12 && est.lower <= 1.0);
        assert!(verify_witness(&p, &est, 2000, 5, 1e-9).unwrap().pass);
        let again = squeeze_optimize(&p, &z, DEFAULT_BUDGET, 2).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn unitary_invariance_of_simple_bound() {
        let inner = DomainSpec::ellipsoid(vec![1.0, 2.0]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)]);
        let fam = ConvexFamily::Rotated {
            inner: Box::new(inner.descriptor().unwrap()),
            unitary: matrix_pairs(&u),
        };
        let rot = DomainSpec::convex(fam.build().unwrap()).unwrap();
        let z = CPoint::new(vec![c(0.2, 0.1), c(-0.3, 0.4)]);
        let uz = CPoint::from_dvector(&(&u * z.to_dvector()));
        let a = affine_squeeze_lower(&inner, &z).unwrap().lower;
        let b = affine_squeeze_lower(&rot, &uz).unwrap().lower;
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn grid_constants() {
        let ball = DomainSpec::unit_ball(2);
        let g = GridSpec::Radial { rays: 6, steps: 4, extent: 0.9 };
        assert_eq!(squeezing_constant_lower(&ball, &g, 50, 0).unwrap().lower, 1.0);
        let p = DomainSpec::polydisk(vec![1.0, 1.0]).unwrap();
        let lat = GridSpec::Lattice { count: 3, extent: 0.95 };
        let rep = squeezing_constant_lower(&p, &lat, 40, 0).unwrap();
        assert!(rep.lower > 0.0 && rep.lower <= 1.0 / 2f64.sqrt() + 1e-9);
        assert!(matches!(squeezing_constant_over(&p, &[], 10, 0), Err(Error::Input(_))));
    }
}

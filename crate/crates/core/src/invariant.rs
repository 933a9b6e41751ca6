//! Kobayashi and Carathéodory metrics as certified intervals.
//!
//! Upper certificates are explicit holomorphic discs through `z` (Kobayashi side),
//! lower certificates explicit holomorphic functionals into the unit disk
//! (Carathéodory side). Metrics are norms here: `𝔎(0, v) = |v|` on the unit ball.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::directions::sphere_directions;
use crate::error::{Error, Result};
use crate::finsler::{hsc_chern_finsler, FinslerMetricModel};
use crate::geometry::{slice_disc, DomainKind, DomainSpec};
use crate::optim::{bisect_threshold, nelder_mead};
use crate::point::{check_dim, check_nonzero, inner, norm_sqr, CPoint, CTangent, C64};
use crate::sampling::{point_vector_pairs, rng, substream};
use crate::squeezing::ball_automorphism;

pub const DEFAULT_EFFORT: usize = 3;
pub const DEFAULT_DIRECTION_BUDGET: usize = 512;
const CIRCLE_SAMPLES: usize = 96;
const VERIFY_RADII: [f64; 3] = [0.9, 0.99, 0.999];
const VERIFY_SAMPLES: usize = 512;
const RESTARTS: usize = 10;

fn cpairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|x| [x.re, x.im]).collect()
}

fn uncpairs(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}

/// Möbius map of the unit disk, `ζ ↦ (ζ + b) / (1 + b̄ ζ)`.
fn mobius(b: C64, zeta: C64) -> C64 {
    (zeta + b) / (C64::new(1.0, 0.0) + b.conj() * zeta)
}

/// `tanh⁻¹ |(z1 - z2) / (1 - z̄1 z2)|`, the distance of the curvature −4 metric `|dz|² / (1 - |z|²)²`.
pub fn poincare_distance(z1: C64, z2: C64) -> Result<f64> {
    if z1.norm() >= 1.0 || z2.norm() >= 1.0 {
        return Err(Error::Input("points must lie in the unit disk".into()));
    }
    let m = ((z1 - z2) / (C64::new(1.0, 0.0) - z1.conj() * z2)).norm();
    Ok(m.min(1.0).atanh())
}

/// `𝒫(z; v) = |v|² / (1 - |z|²)²`.
pub fn poincare_metric(z: C64, v: C64) -> Result<f64> {
    if z.norm() >= 1.0 {
        return Err(Error::Input("point must lie in the unit disk".into()));
    }
    Ok(v.norm_sqr() / (1.0 - z.norm_sqr()).powi(2))
}

/// Holomorphic disc `φ: 𝔻 → ℂⁿ` with `φ(0) = z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiscWitness {
    /// `φ(ζ) = Σ_k coeffs[k] ζ^k`; `coeffs[0] = z`.
    Polynomial { coeffs: Vec<Vec<[f64; 2]>> },
    /// `φ(ζ) = z + v m(ζ)`, `m` the Möbius map of 𝔻 onto `D(c, ρ)` with `m(0) = 0`.
    Slice { z: Vec<[f64; 2]>, v: Vec<[f64; 2]>, center: [f64; 2], radius: f64 },
    /// `φ_k(ζ) = r_k (m_k ζ + a_k) / (1 + ā_k m_k ζ)` on a polydisk.
    Product { radii: Vec<f64>, centers: Vec<[f64; 2]>, multipliers: Vec<[f64; 2]> },
}

impl DiscWitness {
    pub fn eval(&self, zeta: C64) -> Vec<C64> {
        match self {
            DiscWitness::Polynomial { coeffs } => {
                let n = coeffs[0].len();
                let mut out = vec![C64::new(0.0, 0.0); n];
                for c in coeffs.iter().rev() {
                    for (o, ck) in out.iter_mut().zip(c) {
                        *o = *o * zeta + C64::new(ck[0], ck[1]);
                    }
                }
                out
            }
            DiscWitness::Slice { z, v, center, radius } => {
                let c = C64::new(center[0], center[1]);
                let m = c + mobius(-c / radius, zeta) * radius;
                uncpairs(z).iter().zip(uncpairs(v)).map(|(a, b)| a + b * m).collect()
            }
            DiscWitness::Product { radii, centers, multipliers } => radii
                .iter()
                .zip(centers)
                .zip(multipliers)
                .map(|((r, a), m)| {
                    let (a, m) = (C64::new(a[0], a[1]), C64::new(m[0], m[1]));
                    mobius(a, m * zeta) * r
                })
                .collect(),
        }
    }

    /// `φ'(0)`.
    pub fn derivative(&self) -> Vec<C64> {
        match self {
            DiscWitness::Polynomial { coeffs } => {
                coeffs.get(1).map_or_else(|| vec![C64::new(0.0, 0.0); coeffs[0].len()], |c| uncpairs(c))
            }
            DiscWitness::Slice { v, center, radius, .. } => {
                let c = C64::new(center[0], center[1]);
                let d = (radius * radius - c.norm_sqr()) / radius;
                uncpairs(v).iter().map(|b| b * d).collect()
            }
            DiscWitness::Product { radii, centers, multipliers } => radii
                .iter()
                .zip(centers)
                .zip(multipliers)
                .map(|((r, a), m)| {
                    let (a, m) = (C64::new(a[0], a[1]), C64::new(m[0], m[1]));
                    m * (1.0 - a.norm_sqr()) * r
                })
                .collect(),
        }
    }

    /// Sampled check that `φ(ζ)` lies in the domain on the circles `|ζ| ∈ {0.9, 0.99, 0.999}`.
    pub fn verify(&self, domain: &DomainSpec) -> Result<bool> {
        for r in VERIFY_RADII {
            for k in 0..VERIFY_SAMPLES {
                let zeta = C64::from_polar(r, 2.0 * PI * k as f64 / VERIFY_SAMPLES as f64);
                if !domain.contains(&CPoint::new(self.eval(zeta)))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Holomorphic `f: D → 𝔻` with `f(z) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FunctionalWitness {
    /// Half-plane `{Re <w, u> < c}` containing the domain, followed by the Möbius map onto 𝔻.
    HalfPlane { u: Vec<[f64; 2]>, level: f64 },
    /// `<φ_a(Λ w), e>` for the diagonal scaling `Λ` onto the unit ball.
    BallAutomorphism { scale: Vec<f64>, center: Vec<[f64; 2]>, axis: Vec<[f64; 2]> },
    /// Disk automorphism in coordinate `index` of a polydisk.
    Coordinate { index: usize, radius: f64 },
}

impl FunctionalWitness {
    pub fn eval(&self, z: &CPoint, w: &[C64]) -> C64 {
        match self {
            FunctionalWitness::HalfPlane { u, level } => {
                let u = uncpairs(u);
                let x0 = inner(&z.coords, &u);
                let x = inner(w, &u);
                // Re ξ < c  →  𝔻, ξ0 ↦ 0
                (x - x0) / (C64::new(2.0 * level, 0.0) - x - x0.conj())
            }
            FunctionalWitness::BallAutomorphism { scale, center, axis } => {
                let y: Vec<C64> = w.iter().zip(scale).map(|(x, s)| x * s).collect();
                inner(&ball_automorphism(&uncpairs(center), &y), &uncpairs(axis))
            }
            FunctionalWitness::Coordinate { index, radius } => {
                let (a, x) = (z.coords[*index], w[*index]);
                (x - a) * *radius / (C64::new(radius * radius, 0.0) - a.conj() * x)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: FunctionalWitness,
    pub upper_witness: DiscWitness,
}

impl MetricInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.upper + self.lower)
    }
}

fn check_point_vector(domain: &DomainSpec, z: &CPoint, v: &CTangent) -> Result<()> {
    check_dim(domain.dim(), z.dim(), "point")?;
    check_dim(domain.dim(), v.dim(), "vector")?;
    check_nonzero(v)?;
    if !domain.contains(z)? {
        return Err(Error::Domain(format!("point outside {}", domain.label())));
    }
    Ok(())
}

/// `1 / R*` for the largest affine disc `ζ ↦ z + ζ v`, `|ζ| < R*`, inside the domain.
pub fn kobayashi_upper_affine(domain: &DomainSpec, z: &CPoint, v: &CTangent) -> Result<(f64, DiscWitness)> {
    check_point_vector(domain, z, v)?;
    let r = domain.disc_radius(z, v)?;
    let w = DiscWitness::Polynomial { coeffs: vec![cpairs(&z.coords), cpairs(&v.scale_re(r).coords)] };
    Ok((1.0 / r, w))
}

/// Slice disc through `z` along `v` for balls and ellipsoids, as `(c, ρ)` in units of `v`.
fn model_slice(domain: &DomainSpec, z: &CPoint, v: &CTangent) -> Option<(C64, f64)> {
    match domain.kind() {
        DomainKind::Ball { radius } => Some(slice_disc(&z.coords, &v.coords, *radius)),
        DomainKind::ComplexEllipsoid { semiaxes } => {
            let zs: Vec<C64> = z.coords.iter().zip(semiaxes).map(|(x, a)| x / a).collect();
            let vs: Vec<C64> = v.coords.iter().zip(semiaxes).map(|(x, a)| x / a).collect();
            Some(slice_disc(&zs, &vs, 1.0))
        }
        _ => None,
    }
}

/// Best analytic disc: Möbius slice for balls/ellipsoids, product of Möbius maps for polydisks.
fn analytic_disc(domain: &DomainSpec, z: &CPoint, v: &CTangent) -> Option<(f64, DiscWitness)> {
    if let Some((c, rho)) = model_slice(domain, z, v) {
        let value = rho / (rho * rho - c.norm_sqr());
        let w = DiscWitness::Slice { z: cpairs(&z.coords), v: cpairs(&v.coords), center: [c.re, c.im], radius: rho };
        return Some((value, w));
    }
    let DomainKind::Polydisk { radii } = domain.kind() else { return None };
    let value = radii
        .iter()
        .zip(&z.coords)
        .zip(&v.coords)
        .map(|((r, a), b)| r * b.norm() / (r * r - a.norm_sqr()))
        .fold(0.0, f64::max);
    let lam = 1.0 / value;
    let centers: Vec<C64> = z.coords.iter().zip(radii).map(|(a, r)| a / r).collect();
    let multipliers: Vec<C64> = v
        .coords
        .iter()
        .zip(&centers)
        .zip(radii)
        .map(|((b, a), r)| {
            let m = b * lam / (r * (1.0 - a.norm_sqr()));
            // Rounding can push the extremal slot a hair past the unit circle.
            if m.norm() > 1.0 {
                m / m.norm()
            } else {
                m
            }
        })
        .collect();
    Some((
        value,
        DiscWitness::Product { radii: radii.clone(), centers: cpairs(&centers), multipliers: cpairs(&multipliers) },
    ))
}

/// Lower bound from a half-plane functional in direction `u`: `|<v, u>| / (2 (h(u) - Re <z, u>))`.
fn half_plane_value(domain: &DomainSpec, z: &CPoint, v: &CTangent, u: &[C64]) -> f64 {
    let gap = domain.support(u) - inner(&z.coords, u).re;
    inner(&v.coords, u).norm() / (2.0 * gap)
}

/// Analytic functional for balls, ellipsoids and polydisks.
fn analytic_functional(domain: &DomainSpec, z: &CPoint, v: &CTangent) -> Option<(f64, FunctionalWitness)> {
    let scale: Vec<f64> = match domain.kind() {
        DomainKind::Ball { radius } => vec![1.0 / radius; domain.dim()],
        DomainKind::ComplexEllipsoid { semiaxes } => semiaxes.iter().map(|a| 1.0 / a).collect(),
        DomainKind::Polydisk { radii } => {
            let (index, value) = radii
                .iter()
                .zip(&z.coords)
                .zip(&v.coords)
                .map(|((r, a), b)| r * b.norm() / (r * r - a.norm_sqr()))
                .enumerate()
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            return Some((value, FunctionalWitness::Coordinate { index, radius: radii[index] }));
        }
        DomainKind::ConvexSmooth(_) => return None,
    };
    // dφ_a at a applied to Λ v: -(P_a w / (1 - |a|²) + Q_a w / sqrt(1 - |a|²)).
    let a: Vec<C64> = z.coords.iter().zip(&scale).map(|(x, s)| x * s).collect();
    let w: Vec<C64> = v.coords.iter().zip(&scale).map(|(x, s)| x * s).collect();
    let aa = norm_sqr(&a);
    let d: Vec<C64> = if aa == 0.0 {
        w.iter().map(|x| -x).collect()
    } else {
        let p: Vec<C64> = a.iter().map(|x| x * (inner(&w, &a) / aa)).collect();
        w.iter().zip(&p).map(|(wi, pi)| -(pi / (1.0 - aa) + (wi - pi) / (1.0 - aa).sqrt())).collect()
    };
    let value = norm_sqr(&d).sqrt();
    let axis: Vec<C64> = d.iter().map(|x| x / value).collect();
    Some((value, FunctionalWitness::BallAutomorphism { scale, center: cpairs(&a), axis: cpairs(&axis) }))
}

/// Best half-plane functional over the direction set plus the analytic functional, if any.
pub fn caratheodory_lower_support(
    domain: &DomainSpec,
    z: &CPoint,
    v: &CTangent,
    direction_budget: usize,
) -> Result<(f64, FunctionalWitness)> {
    check_point_vector(domain, z, v)?;
    let mut best: Option<(f64, FunctionalWitness)> = None;
    let mut consider = |val: f64, w: FunctionalWitness| {
        if val.is_finite() && best.as_ref().map_or(true, |(b, _)| val > *b) {
            best = Some((val, w));
        }
    };
    // The directions conjugate to v and its dual are good starts on any domain.
    let mut dirs: Vec<Vec<C64>> = vec![v.coords.iter().map(|x| x / v.norm()).collect()];
    dirs.extend(sphere_directions(domain.dim(), direction_budget).into_iter().map(|d| d.coords));
    for u in dirs {
        let val = half_plane_value(domain, z, v, &u);
        consider(val, FunctionalWitness::HalfPlane { u: cpairs(&u), level: domain.support(&u) });
    }
    if let Some((val, w)) = analytic_functional(domain, z, v) {
        consider(val, w);
    }
    best.ok_or_else(|| Error::Degenerate("no finite functional certificate".into()))
}

/// Largest `R` with `z + R (ζ v + Σ c_k ζ^k)` inside the domain on the sampled unit circle.
fn polynomial_radius(domain: &DomainSpec, z: &CPoint, v: &CTangent, extra: &[Vec<C64>], circle: &[C64]) -> f64 {
    let shape: Vec<Vec<C64>> = circle
        .iter()
        .map(|&zeta| {
            let mut p: Vec<C64> = v.coords.iter().map(|x| x * zeta).collect();
            let mut zk = zeta;
            for c in extra {
                zk *= zeta;
                for (pi, ci) in p.iter_mut().zip(c) {
                    *pi += ci * zk;
                }
            }
            p
        })
        .collect();
    let feasible = |r: f64| {
        shape.iter().all(|p| {
            let w: Vec<C64> = z.coords.iter().zip(p).map(|(a, b)| a + b * r).collect();
            domain.gauge(&w) < 1.0
        })
    };
    let mut hi = domain.disc_radius(z, v).unwrap_or(1.0) * 4.0 + 1e-300;
    while feasible(hi) {
        hi *= 2.0;
        if !hi.is_finite() {
            return 0.0;
        }
    }
    bisect_threshold(feasible, 0.0, hi, 1e-12)
}

/// Polynomial disc of degree `effort` through `z` with `φ'(0) ∝ v`, radius optimized from 10 seeded restarts.
fn polynomial_disc(domain: &DomainSpec, z: &CPoint, v: &CTangent, effort: usize, seed: u64) -> Option<(f64, DiscWitness)> {
    if effort < 2 {
        return None;
    }
    let n = domain.dim();
    let k = effort - 1;
    let circle: Vec<C64> =
        (0..CIRCLE_SAMPLES).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / CIRCLE_SAMPLES as f64)).collect();
    let unpack = |x: &[f64]| -> Vec<Vec<C64>> {
        (0..k).map(|m| (0..n).map(|i| C64::new(x[2 * (m * n + i)], x[2 * (m * n + i) + 1])).collect()).collect()
    };
    let scale = v.norm();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for restart in 0..RESTARTS {
        let mut r = rng(substream(seed, restart as u64));
        let x0: Vec<f64> = (0..2 * n * k)
            .map(|_| if restart == 0 { 0.0 } else { 0.2 * scale * (rand::Rng::random::<f64>(&mut r) - 0.5) })
            .collect();
        let res = nelder_mead(|x| -polynomial_radius(domain, z, v, &unpack(x), &circle), &x0, 0.1 * scale, 200, 1e-12);
        if best.as_ref().map_or(true, |(b, _)| -res.value > *b) {
            best = Some((-res.value, res.x));
        }
    }
    let (_, x) = best?;
    let extra = unpack(&x);
    // Re-derive the radius on a finer circle so the witness is checked at higher resolution.
    let fine: Vec<C64> =
        (0..8 * CIRCLE_SAMPLES).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / (8 * CIRCLE_SAMPLES) as f64)).collect();
    let r = polynomial_radius(domain, z, v, &extra, &fine) * (1.0 - 1e-9);
    if !(r > 0.0) {
        return None;
    }
    let mut coeffs = vec![cpairs(&z.coords), cpairs(&v.scale_re(r).coords)];
    coeffs.extend(extra.iter().map(|c| c.iter().map(|x| [x.re * r, x.im * r]).collect()));
    Some((1.0 / r, DiscWitness::Polynomial { coeffs }))
}

/// Certified interval `[ℭ-certificate, 𝔎-certificate]`.
pub fn kobayashi_metric(domain: &DomainSpec, z: &CPoint, v: &CTangent, effort: usize) -> Result<MetricInterval> {
    kobayashi_metric_seeded(domain, z, v, effort, 0)
}

pub fn kobayashi_metric_seeded(domain: &DomainSpec, z: &CPoint, v: &CTangent, effort: usize, seed: u64) -> Result<MetricInterval> {
    let (lower, lower_witness) = caratheodory_lower_support(domain, z, v, DEFAULT_DIRECTION_BUDGET)?;
    let (mut upper, mut upper_witness) = kobayashi_upper_affine(domain, z, v)?;
    if let Some((val, w)) = analytic_disc(domain, z, v) {
        if val < upper {
            upper = val;
            upper_witness = w;
        }
    }
    if upper - lower > 1e-9 {
        if let Some((val, w)) = polynomial_disc(domain, z, v, effort, seed) {
            if val < upper {
                upper = val;
                upper_witness = w;
            }
        }
    }
    // Both sides are certificates; rounding alone can invert an exact collapse.
    let upper = upper.max(lower);
    Ok(MetricInterval { lower, upper, lower_witness, upper_witness })
}

/// Upper bound for the Kobayashi distance from chains of affine discs along the segment `p → q`
/// (with up to `chain_budget` links), and the exact slice or product disc on model domains.
pub fn kobayashi_distance_upper(domain: &DomainSpec, p: &CPoint, q: &CPoint, chain_budget: usize) -> Result<f64> {
    for x in [p, q] {
        check_dim(domain.dim(), x.dim(), "point")?;
        if !domain.contains(x)? {
            return Err(Error::Domain(format!("point outside {}", domain.label())));
        }
    }
    let diff = CTangent::new(q.coords.iter().zip(&p.coords).map(|(a, b)| a - b).collect());
    let len = diff.norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    let u = diff.scale_re(1.0 / len);
    let mut best = f64::INFINITY;
    if let Some((c, rho)) = model_slice(domain, p, &u) {
        // p is ζ = 0 and q is ζ = len in the slice disc D(c, ρ).
        best = poincare_distance(-c / rho, (C64::new(len, 0.0) - c) / rho)?;
    }
    if let DomainKind::Polydisk { radii } = domain.kind() {
        let mut m: f64 = 0.0;
        for ((a, b), r) in p.coords.iter().zip(&q.coords).zip(radii) {
            m = m.max(poincare_distance(a / r, b / r)?);
        }
        best = best.min(m);
    }
    for links in 1..=chain_budget.max(1) {
        let mut total = 0.0;
        let mut ok = true;
        for i in 0..links {
            let a = p.displaced(&u, C64::new(len * i as f64 / links as f64, 0.0));
            let step = len / links as f64;
            let r = domain.disc_radius(&a, &u)?;
            if step >= r {
                ok = false;
                break;
            }
            total += poincare_distance(C64::new(0.0, 0.0), C64::new(step / r, 0.0))?;
        }
        if ok {
            best = best.min(total);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub samples: usize,
    pub seed: u64,
    pub b: f64,
    /// `min (𝔎²_lower / ((B/4) G) - 1)`.
    pub min_margin: f64,
    pub worst_point: CPoint,
    pub worst_vector: CTangent,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `𝔎² ≥ (B/4) G` with the Carathéodory-side certificate of `𝔎`.
///
/// With `b = None` the bound is measured as `-max HSC` over the samples.
/// A supplied `b` is checked against the measured curvature first.
pub fn hyperbolicity_check(
    domain: &DomainSpec,
    model: &dyn FinslerMetricModel,
    b: Option<f64>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<HyperbolicityReport> {
    let pairs = point_vector_pairs(domain, samples, 0.95, seed);
    let hscs: Vec<f64> = pairs.par_iter().map(|(z, v)| hsc_chern_finsler(model, z, v)).collect::<Result<_>>()?;
    let measured = -hscs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let b = match b {
        Some(b) => {
            if !(b > 0.0) {
                return Err(Error::Input(format!("curvature bound B = {b} must be positive")));
            }
            if measured < b - 1e-6 * b.max(1.0) {
                return Err(Error::Precondition(format!("measured HSC reaches {} > -B = {}", -measured, -b)));
            }
            b
        }
        None => measured,
    };
    if !(b > 0.0) {
        return Err(Error::Input(format!("metric curvature is not bounded above by a negative constant (B = {b})")));
    }
    let margins: Vec<f64> = pairs
        .par_iter()
        .map(|(z, v)| {
            let (lo, _) = caratheodory_lower_support(domain, z, v, DEFAULT_DIRECTION_BUDGET)?;
            let g = model.eval(z, v)?;
            Ok(lo * lo / (0.25 * b * g) - 1.0)
        })
        .collect::<Result<_>>()?;
    let (k, min_margin) =
        margins.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    Ok(HyperbolicityReport {
        samples,
        seed,
        b,
        min_margin,
        worst_point: pairs[k].0.clone(),
        worst_vector: pairs[k].1.clone(),
        tolerance: tol,
        pass: min_margin >= -tol,
    })
}

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::convex::{ConvexFamily, ConvexOracle};
use super::ellipsoid;
use crate::directions::sphere_directions;
use crate::error::{Error, Result};
use crate::optim::golden_max;
use crate::point::{check_dim, inner, norm_sqr, CPoint, CTangent, C64};

const CONVEX_TOL: f64 = 1e-10;
const CONVEX_MAX_ITER: usize = 10_000;
pub const DEFAULT_DIRECTION_COUNT: usize = 4096;

#[derive(Clone)]
pub enum DomainKind {
    Ball { radius: f64 },
    Polydisk { radii: Vec<f64> },
    ComplexEllipsoid { semiaxes: Vec<f64> },
    ConvexSmooth(Arc<dyn ConvexOracle>),
}

impl fmt::Debug for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Ball { radius } => write!(f, "Ball({radius})"),
            DomainKind::Polydisk { radii } => write!(f, "Polydisk({radii:?})"),
            DomainKind::ComplexEllipsoid { semiaxes } => write!(f, "ComplexEllipsoid({semiaxes:?})"),
            DomainKind::ConvexSmooth(o) => write!(f, "ConvexSmooth({o:?})"),
        }
    }
}

/// A bounded convex domain, stored recentered so that the origin is interior.
///
/// Every point-valued method works in the recentered coordinates; use
/// [`DomainSpec::to_internal`] / [`DomainSpec::to_original`] at the edges.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    kind: DomainKind,
    dim: usize,
    sup_norm: f64,
    center: Vec<C64>,
    directions: usize,
}

/// Serializable form of a domain (the domain file schema).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainDescriptor {
    Ball {
        dimension: usize,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<[f64; 2]>>,
    },
    Polydisk {
        radii: Vec<f64>,
    },
    ComplexEllipsoid {
        semiaxes: Vec<f64>,
    },
    ConvexSmooth {
        family: ConvexFamily,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        directions: Option<usize>,
    },
}

fn positive(xs: &[f64], what: &str) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Input(format!("{what}: empty parameter list")));
    }
    if xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Input(format!("{what}: parameters must be finite and positive")));
    }
    Ok(())
}

fn gaussian_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let nrm = norm_sqr(&v).sqrt();
        if nrm > 1e-12 {
            return v.into_iter().map(|c| c / nrm).collect();
        }
    }
}

impl DomainSpec {
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        Self::ball_centered(vec![C64::new(0.0, 0.0); n], radius)
    }

    /// Ball `B(center, radius)`; stored as `B(0, radius)` with the center as recentering.
    pub fn ball_centered(center: Vec<C64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::Input("dimension must be >= 1".into()));
        }
        positive(&[radius], "ball radius")?;
        Ok(Self {
            dim: center.len(),
            kind: DomainKind::Ball { radius },
            sup_norm: radius,
            center,
            directions: DEFAULT_DIRECTION_COUNT,
        })
    }

    pub fn unit_ball(n: usize) -> Self {
        Self::ball(n, 1.0).expect("unit ball")
    }

    pub fn unit_disk() -> Self {
        Self::unit_ball(1)
    }

    pub fn polydisk(radii: Vec<f64>) -> Result<Self> {
        positive(&radii, "polydisk radii")?;
        let n = radii.len();
        Ok(Self {
            dim: n,
            sup_norm: norm_sqr_real(&radii).sqrt(),
            kind: DomainKind::Polydisk { radii },
            center: vec![C64::new(0.0, 0.0); n],
            directions: DEFAULT_DIRECTION_COUNT,
        })
    }

    pub fn ellipsoid(semiaxes: Vec<f64>) -> Result<Self> {
        positive(&semiaxes, "ellipsoid semiaxes")?;
        let n = semiaxes.len();
        Ok(Self {
            dim: n,
            sup_norm: semiaxes.iter().cloned().fold(0.0, f64::max),
            kind: DomainKind::ComplexEllipsoid { semiaxes },
            center: vec![C64::new(0.0, 0.0); n],
            directions: DEFAULT_DIRECTION_COUNT,
        })
    }

    /// Generic convex domain. The oracle must describe a bounded body with 0 interior.
    pub fn convex(oracle: Arc<dyn ConvexOracle>) -> Result<Self> {
        Self::convex_with_directions(oracle, DEFAULT_DIRECTION_COUNT)
    }

    pub fn convex_with_directions(oracle: Arc<dyn ConvexOracle>, directions: usize) -> Result<Self> {
        let n = oracle.dim();
        if n == 0 {
            return Err(Error::Input("dimension must be >= 1".into()));
        }
        if directions == 0 {
            return Err(Error::Config("direction count must be positive".into()));
        }
        if oracle.gauge(&vec![C64::new(0.0, 0.0); n]) >= 1.0 {
            return Err(Error::Config("convex oracle does not contain the origin".into()));
        }
        let mut d = Self {
            dim: n,
            kind: DomainKind::ConvexSmooth(oracle),
            sup_norm: f64::NAN,
            center: vec![C64::new(0.0, 0.0); n],
            directions,
        };
        let m0 = d.support_extremum(&vec![C64::new(0.0, 0.0); n], true)?;
        d.sup_norm = m0;
        Ok(d)
    }

    pub fn from_descriptor(desc: &DomainDescriptor) -> Result<Self> {
        match desc {
            DomainDescriptor::Ball { dimension, radius, center } => match center {
                None => Self::ball(*dimension, *radius),
                Some(c) => {
                    if c.len() != *dimension {
                        return Err(Error::Input("ball center has wrong dimension".into()));
                    }
                    Self::ball_centered(c.iter().map(|p| C64::new(p[0], p[1])).collect(), *radius)
                }
            },
            DomainDescriptor::Polydisk { radii } => Self::polydisk(radii.clone()),
            DomainDescriptor::ComplexEllipsoid { semiaxes } => Self::ellipsoid(semiaxes.clone()),
            DomainDescriptor::ConvexSmooth { family, directions } => {
                Self::convex_with_directions(family.build()?, directions.unwrap_or(DEFAULT_DIRECTION_COUNT))
            }
        }
    }

    /// `None` for convex oracles outside the built-in families.
    pub fn descriptor(&self) -> Option<DomainDescriptor> {
        Some(match &self.kind {
            DomainKind::Ball { radius } => DomainDescriptor::Ball {
                dimension: self.dim,
                radius: *radius,
                center: if self.center.iter().all(|c| c.norm_sqr() == 0.0) {
                    None
                } else {
                    Some(self.center.iter().map(|c| [c.re, c.im]).collect())
                },
            },
            DomainKind::Polydisk { radii } => DomainDescriptor::Polydisk { radii: radii.clone() },
            DomainKind::ComplexEllipsoid { semiaxes } => {
                DomainDescriptor::ComplexEllipsoid { semiaxes: semiaxes.clone() }
            }
            DomainKind::ConvexSmooth(o) => DomainDescriptor::ConvexSmooth {
                family: o.family()?,
                directions: (self.directions != DEFAULT_DIRECTION_COUNT).then_some(self.directions),
            },
        })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `M0 = sup ||z||` over the recentered domain.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Translation applied at construction (original = internal + center).
    pub fn recentering(&self) -> &[C64] {
        &self.center
    }

    pub fn to_internal(&self, original: &CPoint) -> CPoint {
        CPoint::new(original.coords.iter().zip(&self.center).map(|(a, c)| a - c).collect())
    }

    pub fn to_original(&self, internal: &CPoint) -> CPoint {
        CPoint::new(internal.coords.iter().zip(&self.center).map(|(a, c)| a + c).collect())
    }

    pub fn is_reinhardt(&self) -> bool {
        match &self.kind {
            DomainKind::ConvexSmooth(o) => o.is_reinhardt(),
            _ => true,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            DomainKind::Ball { radius } => format!("ball(n={}, r={radius})", self.dim),
            DomainKind::Polydisk { radii } => format!("polydisk{radii:?}"),
            DomainKind::ComplexEllipsoid { semiaxes } => format!("ellipsoid{semiaxes:?}"),
            DomainKind::ConvexSmooth(_) => format!("convex(n={})", self.dim),
        }
    }

    /// Minkowski functional; `< 1` exactly on the interior.
    pub fn gauge(&self, w: &[C64]) -> f64 {
        match &self.kind {
            DomainKind::Ball { radius } => norm_sqr(w).sqrt() / radius,
            DomainKind::Polydisk { radii } => {
                w.iter().zip(radii).map(|(x, r)| x.norm() / r).fold(0.0, f64::max)
            }
            DomainKind::ComplexEllipsoid { semiaxes } => w
                .iter()
                .zip(semiaxes)
                .map(|(x, a)| x.norm_sqr() / (a * a))
                .sum::<f64>()
                .sqrt(),
            DomainKind::ConvexSmooth(o) => o.gauge(w),
        }
    }

    /// Support function `h(u) = sup_{w in D} Re<w, u>`.
    pub fn support(&self, u: &[C64]) -> f64 {
        match &self.kind {
            DomainKind::Ball { radius } => radius * norm_sqr(u).sqrt(),
            DomainKind::Polydisk { radii } => u.iter().zip(radii).map(|(x, r)| r * x.norm()).sum(),
            DomainKind::ComplexEllipsoid { semiaxes } => u
                .iter()
                .zip(semiaxes)
                .map(|(x, a)| a * a * x.norm_sqr())
                .sum::<f64>()
                .sqrt(),
            DomainKind::ConvexSmooth(o) => o.support(u),
        }
    }

    /// Defining function `rho = gauge - 1` (negative inside).
    pub fn defining_function(&self, w: &[C64]) -> f64 {
        self.gauge(w) - 1.0
    }

    pub fn contains(&self, z: &CPoint) -> Result<bool> {
        check_dim(self.dim, z.dim(), "point")?;
        Ok(self.gauge(&z.coords) < 1.0)
    }

    fn require_closure(&self, z: &CPoint) -> Result<f64> {
        check_dim(self.dim, z.dim(), "point")?;
        let g = self.gauge(&z.coords);
        if !g.is_finite() || g > 1.0 + 1e-14 {
            return Err(Error::Domain(format!("point outside the closure of {}", self.label())));
        }
        Ok(g)
    }

    fn require_interior(&self, z: &CPoint) -> Result<()> {
        if self.require_closure(z)? >= 1.0 {
            return Err(Error::Domain(format!("point not interior to {}", self.label())));
        }
        Ok(())
    }

    /// Euclidean distance to the boundary.
    pub fn boundary_distance(&self, z: &CPoint) -> Result<f64> {
        let g = self.require_closure(z)?;
        if g >= 1.0 {
            return Ok(0.0);
        }
        Ok(match &self.kind {
            DomainKind::Ball { radius } => radius - z.norm(),
            DomainKind::Polydisk { radii } => z
                .coords
                .iter()
                .zip(radii)
                .map(|(x, r)| r - x.norm())
                .fold(f64::INFINITY, f64::min),
            DomainKind::ComplexEllipsoid { semiaxes } => {
                let (b, y) = real_ellipsoid(semiaxes, z);
                ellipsoid::nearest_boundary_distance(&b, &y)
            }
            DomainKind::ConvexSmooth(_) => self.support_extremum(&z.coords, false)?,
        })
    }

    /// `R(z) = sup_{w in D} |w - z|`.
    pub fn enclosing_radius(&self, z: &CPoint) -> Result<f64> {
        self.require_closure(z)?;
        Ok(match &self.kind {
            DomainKind::Ball { radius } => radius + z.norm(),
            DomainKind::Polydisk { radii } => z
                .coords
                .iter()
                .zip(radii)
                .map(|(x, r)| (r + x.norm()).powi(2))
                .sum::<f64>()
                .sqrt(),
            DomainKind::ComplexEllipsoid { semiaxes } => {
                let (b, y) = real_ellipsoid(semiaxes, z);
                ellipsoid::farthest_boundary_distance(&b, &y)
            }
            DomainKind::ConvexSmooth(_) => self.support_extremum(&z.coords, true)?,
        })
    }

    /// Extremum over unit `u` of the support margin `h(u) - Re<z, u>`.
    ///
    /// The minimum is the boundary distance, the maximum the enclosing radius.
    /// Starts from the best member of the direction set, then runs projected
    /// gradient steps on the sphere.
    fn support_extremum(&self, z: &[C64], maximize: bool) -> Result<f64> {
        let sign = if maximize { -1.0 } else { 1.0 };
        let f = |u: &[C64]| sign * (self.support(u) - inner(z, u).re);
        let mut best: Option<(f64, Vec<C64>)> = None;
        for d in sphere_directions(self.dim, self.directions) {
            let val = f(&d.coords);
            if !val.is_finite() {
                return Err(Error::Config("support oracle returned a non-finite value".into()));
            }
            if best.as_ref().map_or(true, |(b, _)| val < *b) {
                best = Some((val, d.coords));
            }
        }
        let (mut fu, mut u) = best.expect("direction set is nonempty");
        let mut step = 0.1;
        for _ in 0..CONVEX_MAX_ITER {
            let grad = real_gradient(&f, &u);
            // Tangential component.
            let radial = inner(&grad, &u).re;
            let tang: Vec<C64> = grad.iter().zip(&u).map(|(g, x)| g - x * radial).collect();
            let tnorm = norm_sqr(&tang).sqrt();
            if tnorm < CONVEX_TOL {
                break;
            }
            let mut moved = false;
            while step > 1e-14 {
                let cand = normalize(&u.iter().zip(&tang).map(|(x, g)| x - g * step).collect::<Vec<_>>());
                let fc = f(&cand);
                if fc < fu {
                    let delta = fu - fc;
                    u = cand;
                    fu = fc;
                    step *= 1.5;
                    moved = true;
                    if delta < CONVEX_TOL * CONVEX_TOL {
                        step = 0.0;
                    }
                    break;
                }
                step *= 0.5;
            }
            if !moved || step * tnorm < CONVEX_TOL {
                break;
            }
        }
        Ok(sign * fu)
    }

    /// `sup { t >= 0 : z + t v in D }` along a real ray.
    pub fn ray_exit(&self, z: &CPoint, v: &CTangent) -> Result<f64> {
        self.require_interior(z)?;
        check_dim(self.dim, v.dim(), "vector")?;
        if v.is_zero() {
            return Ok(f64::INFINITY);
        }
        Ok(match &self.kind {
            DomainKind::Ball { radius } => {
                quadratic_exit(v.norm_sqr(), inner(&z.coords, &v.coords).re, z.norm_sqr() - radius * radius)
            }
            DomainKind::ComplexEllipsoid { semiaxes } => {
                let zs: Vec<C64> = z.coords.iter().zip(semiaxes).map(|(x, a)| x / a).collect();
                let vs: Vec<C64> = v.coords.iter().zip(semiaxes).map(|(x, a)| x / a).collect();
                quadratic_exit(norm_sqr(&vs), inner(&zs, &vs).re, norm_sqr(&zs) - 1.0)
            }
            DomainKind::Polydisk { radii } => z
                .coords
                .iter()
                .zip(&v.coords)
                .zip(radii)
                .filter(|((_, b), _)| b.norm_sqr() > 0.0)
                .map(|((a, b), r)| quadratic_exit(b.norm_sqr(), (a * b.conj()).re, a.norm_sqr() - r * r))
                .fold(f64::INFINITY, f64::min),
            DomainKind::ConvexSmooth(_) => {
                let g = |t: f64| self.gauge(&z.displaced(v, C64::new(t, 0.0)).coords);
                let mut hi = 1.0 / v.norm();
                while g(hi) < 1.0 {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return Err(Error::Config("convex oracle appears unbounded".into()));
                    }
                }
                crate::optim::bisect_threshold(|t| g(t) < 1.0, 0.0, hi, 1e-15)
            }
        })
    }

    /// Largest `r` with `z + zeta v in D` for every `|zeta| < r` (radius of the
    /// biggest affine disc through `z` in direction `v`).
    pub fn disc_radius(&self, z: &CPoint, v: &CTangent) -> Result<f64> {
        self.require_interior(z)?;
        check_dim(self.dim, v.dim(), "vector")?;
        crate::point::check_nonzero(v)?;
        Ok(match &self.kind {
            DomainKind::Ball { radius } => {
                let (c, rho) = slice_disc(&z.coords, &v.coords, *radius);
                rho - c.norm()
            }
            DomainKind::ComplexEllipsoid { semiaxes } => {
                let zs: Vec<C64> = z.coords.iter().zip(semiaxes).map(|(x, a)| x / a).collect();
                let vs: Vec<C64> = v.coords.iter().zip(semiaxes).map(|(x, a)| x / a).collect();
                let (c, rho) = slice_disc(&zs, &vs, 1.0);
                rho - c.norm()
            }
            DomainKind::Polydisk { radii } => z
                .coords
                .iter()
                .zip(&v.coords)
                .zip(radii)
                .filter(|((_, b), _)| b.norm_sqr() > 0.0)
                .map(|((a, b), r)| (r - a.norm()) / b.norm())
                .fold(f64::INFINITY, f64::min),
            DomainKind::ConvexSmooth(_) => {
                let exit = |theta: f64| {
                    self.ray_exit(z, &v.scale(C64::from_polar(1.0, theta))).unwrap_or(f64::INFINITY)
                };
                let m = 256;
                let h = 2.0 * PI / m as f64;
                let (k, _) = (0..m)
                    .map(|k| (k, exit(k as f64 * h)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("nonempty");
                let t0 = k as f64 * h;
                let (_, neg) = golden_max(|t| -exit(t), t0 - h, t0 + h, 1e-12);
                -neg
            }
        })
    }

    /// A domain scaled by `t > 0` about the origin.
    pub fn dilate(&self, t: f64) -> Result<Self> {
        positive(&[t], "dilation factor")?;
        let center: Vec<C64> = self.center.iter().map(|c| c * t).collect();
        match &self.kind {
            DomainKind::Ball { radius } => Self::ball_centered(center, radius * t),
            DomainKind::Polydisk { radii } => Self::polydisk(radii.iter().map(|r| r * t).collect()),
            DomainKind::ComplexEllipsoid { semiaxes } => {
                Self::ellipsoid(semiaxes.iter().map(|a| a * t).collect())
            }
            DomainKind::ConvexSmooth(o) => {
                Self::convex_with_directions(Arc::new(Dilated { inner: o.clone(), t }), self.directions)
            }
        }
    }

    /// Interior points with gauge at most `max_gauge`, uniform in volume within that shell.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R, max_gauge: f64) -> CPoint {
        let u = gaussian_direction(rng, self.dim);
        let scale = 1.0 / self.gauge(&u);
        let t: f64 = rng.random::<f64>().powf(1.0 / (2 * self.dim) as f64) * max_gauge.min(1.0);
        CPoint::new(u.iter().map(|x| x * (scale * t)).collect())
    }

    /// Boundary points along uniformly random rays from the origin.
    pub fn sample_boundary<R: Rng + ?Sized>(&self, rng: &mut R) -> CPoint {
        let u = gaussian_direction(rng, self.dim);
        let scale = 1.0 / self.gauge(&u);
        CPoint::new(u.iter().map(|x| x * scale).collect())
    }

    /// Uniform random unit vector.
    pub fn sample_direction<R: Rng + ?Sized>(&self, rng: &mut R) -> CTangent {
        CTangent::new(gaussian_direction(rng, self.dim))
    }
}

fn norm_sqr_real(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum()
}

fn normalize(u: &[C64]) -> Vec<C64> {
    let n = norm_sqr(u).sqrt();
    u.iter().map(|x| x / n).collect()
}

/// Gradient of a real function on C^n = R^{2n}, returned as complex vector `d/dx + i d/dy`.
fn real_gradient<F: Fn(&[C64]) -> f64>(f: &F, u: &[C64]) -> Vec<C64> {
    let h = 1e-6;
    (0..u.len())
        .map(|k| {
            let mut parts = [0.0; 2];
            for (slot, dir) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].into_iter().enumerate() {
                let mut p = u.to_vec();
                let mut m = u.to_vec();
                p[k] += dir * h;
                m[k] -= dir * h;
                parts[slot] = (f(&p) - f(&m)) / (2.0 * h);
            }
            C64::new(parts[0], parts[1])
        })
        .collect()
}

/// Positive root of `a t^2 + 2 b t + c = 0` with `a > 0`, `c < 0`.
fn quadratic_exit(a: f64, b: f64, c: f64) -> f64 {
    let disc = (b * b - a * c).max(0.0).sqrt();
    // Stable form of (-b + disc) / a.
    if b <= 0.0 {
        (-b + disc) / a
    } else {
        -c / (b + disc)
    }
}

/// Slice `{zeta : ||z + zeta v|| < radius}` is the disc `D(c, rho)` in the zeta-plane.
pub(crate) fn slice_disc(z: &[C64], v: &[C64], radius: f64) -> (C64, f64) {
    let r = norm_sqr(v);
    let zv = inner(z, v);
    let c = -zv / r;
    let rho2 = (radius * radius - norm_sqr(z) + zv.norm_sqr() / r) / r;
    (c, rho2.max(0.0).sqrt())
}

fn real_ellipsoid(semiaxes: &[f64], z: &CPoint) -> (Vec<f64>, Vec<f64>) {
    let b = semiaxes.iter().flat_map(|a| [*a, *a]).collect();
    (b, z.to_real_pairs())
}

#[derive(Debug)]
struct Dilated {
    inner: Arc<dyn ConvexOracle>,
    t: f64,
}

impl ConvexOracle for Dilated {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn gauge(&self, w: &[C64]) -> f64 {
        let s: Vec<C64> = w.iter().map(|x| x / self.t).collect();
        self.inner.gauge(&s)
    }
    fn support(&self, u: &[C64]) -> f64 {
        self.t * self.inner.support(u)
    }
    fn is_reinhardt(&self) -> bool {
        self.inner.is_reinhardt()
    }
}

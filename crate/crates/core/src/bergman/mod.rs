//! Bergman kernels, metrics and curvatures.
//!
//! Curvatures here use `Sec = R(v, v̄, v, v̄) / g(v)²`, half the Gaussian-curvature
//! normalization of the Finsler module; the unit ball has `Sec = -2/(n+1)`.

mod numerical;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use numerical::{cache_hash, monomials, Basis, NumericalKernel, QuadratureSpec};

use crate::error::{Error, Result};
use crate::geometry::{DomainKind, DomainSpec};
use crate::jet::{coordinates, norm_sqr_jet, Jet, JetSpace};
use crate::kahler::{hsc_of_tensor, metric_jet_from_potential, quad, CurvatureTensor, KahlerMetricField, MetricJet};
use crate::point::{check_dim, check_nonzero, CPoint, CTangent, C64};

/// Anything that can report the kernel on the diagonal.
pub trait KernelDiagonal: Send + Sync {
    fn dim(&self) -> usize;
    fn kernel_diag(&self, z: &CPoint) -> Result<f64>;
}

#[derive(Debug, Clone)]
pub enum KernelKind {
    Ball { radius: f64 },
    Polydisk { radii: Vec<f64> },
    Numerical(Arc<NumericalKernel>),
}

/// A Bergman kernel on a domain; points are in the domain's internal coordinates.
#[derive(Debug, Clone)]
pub struct BergmanKernelModel {
    kind: KernelKind,
    domain: DomainSpec,
}

impl BergmanKernelModel {
    /// Closed form, available for balls and polydisks.
    pub fn closed_form(domain: &DomainSpec) -> Result<Self> {
        let kind = match domain.kind() {
            DomainKind::Ball { radius } => KernelKind::Ball { radius: *radius },
            DomainKind::Polydisk { radii } => KernelKind::Polydisk { radii: radii.clone() },
            _ => {
                return Err(Error::UnsupportedDomain(format!("no closed-form kernel for {}", domain.label())))
            }
        };
        Ok(Self { kind, domain: domain.clone() })
    }

    pub fn numerical(domain: &DomainSpec, kernel: NumericalKernel) -> Result<Self> {
        check_dim(domain.dim(), kernel.dim, "kernel")?;
        Ok(Self { kind: KernelKind::Numerical(Arc::new(kernel)), domain: domain.clone() })
    }

    /// Closed form where available, otherwise a numerical kernel of the given degree.
    pub fn for_domain(domain: &DomainSpec, degree: usize) -> Result<Self> {
        Self::closed_form(domain).or_else(|_| build_numerical_kernel(domain, degree, QuadratureSpec::for_degree(degree)))
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn numerical_kernel(&self) -> Option<&NumericalKernel> {
        match &self.kind {
            KernelKind::Numerical(k) => Some(k),
            _ => None,
        }
    }

    fn check(&self, z: &CPoint) -> Result<()> {
        check_dim(self.domain.dim(), z.dim(), "point")?;
        if !self.domain.contains(z)? {
            return Err(Error::Domain(format!("point outside {}", self.domain.label())));
        }
        Ok(())
    }

    /// Jet of `log K(z, z)` at `z`, of orders `(2, 2)`.
    pub fn log_kernel_jet(&self, z: &CPoint) -> Result<Jet> {
        self.check(z)?;
        let n = self.domain.dim();
        let space = JetSpace::new(n, 2, 2);
        let (zj, zbj) = coordinates(&space, &z.coords);
        let log_k = match &self.kind {
            KernelKind::Ball { radius } => {
                let l2 = radius * radius;
                let c = (factorial(n) / PI.powi(n as i32) * l2).ln();
                let t = norm_sqr_jet(&zj, &zbj);
                t.scale(C64::new(-1.0, 0.0)).add_const(C64::new(l2, 0.0)).ln().scale(C64::new(-(n as f64 + 1.0), 0.0)).add_const(C64::new(c, 0.0))
            }
            KernelKind::Polydisk { radii } => {
                let mut acc = Jet::real(&space, 0.0);
                for (j, r) in radii.iter().enumerate() {
                    let r2 = r * r;
                    let t = &zj[j] * &zbj[j];
                    let term = t.scale(C64::new(-1.0, 0.0)).add_const(C64::new(r2, 0.0)).ln().scale(C64::new(-2.0, 0.0));
                    acc = &acc + &term.add_const(C64::new((r2 / PI).ln(), 0.0));
                }
                acc
            }
            KernelKind::Numerical(k) => {
                let idx = Jet::holo_indices(&space).to_vec();
                let lookup: HashMap<Vec<u8>, usize> = idx.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
                let rows = k.taylor(&z.coords, &idx);
                let w = idx.len();
                let mut m = vec![C64::new(0.0, 0.0); w * w];
                for r in &rows {
                    for a in 0..w {
                        for b in 0..w {
                            m[a * w + b] += r[a] * r[b].conj();
                        }
                    }
                }
                if !(m[0].re > 0.0 && m[0].re.is_finite()) {
                    return Err(Error::Degenerate(format!("kernel value {} is not positive", m[0].re)));
                }
                Jet::from_fn(&space, |a, b| m[lookup[a] * w + lookup[b]]).ln()
            }
        };
        Ok(log_k)
    }
}

impl KernelDiagonal for BergmanKernelModel {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn kernel_diag(&self, z: &CPoint) -> Result<f64> {
        self.check(z)?;
        let n = self.domain.dim();
        let k = match &self.kind {
            KernelKind::Ball { radius } => {
                let l2 = radius * radius;
                factorial(n) / PI.powi(n as i32) * l2 * (l2 - z.norm_sqr()).powi(-(n as i32 + 1))
            }
            KernelKind::Polydisk { radii } => radii
                .iter()
                .zip(&z.coords)
                .map(|(r, x)| r * r / (PI * (r * r - x.norm_sqr()).powi(2)))
                .product(),
            KernelKind::Numerical(k) => k.diag(&z.coords),
        };
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Degenerate(format!("kernel value {k} is not positive")));
        }
        Ok(k)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn kernel_diag(model: &BergmanKernelModel, z: &CPoint) -> Result<f64> {
    model.kernel_diag(z)
}

pub fn build_numerical_kernel(domain: &DomainSpec, max_degree: usize, quad: QuadratureSpec) -> Result<BergmanKernelModel> {
    BergmanKernelModel::numerical(domain, NumericalKernel::build(domain, max_degree, quad)?)
}

/// `g_{αβ̄} = ∂_α ∂̄_β log K(z, z)`.
#[derive(Debug, Clone)]
pub struct BergmanMetricField {
    kernel: BergmanKernelModel,
}

impl BergmanMetricField {
    pub fn new(kernel: BergmanKernelModel) -> Self {
        Self { kernel }
    }

    pub fn closed_form(domain: &DomainSpec) -> Result<Self> {
        Ok(Self::new(BergmanKernelModel::closed_form(domain)?))
    }

    pub fn kernel(&self) -> &BergmanKernelModel {
        &self.kernel
    }
}

impl KahlerMetricField for BergmanMetricField {
    fn dim(&self) -> usize {
        self.kernel.domain.dim()
    }

    fn domain(&self) -> Option<&DomainSpec> {
        Some(&self.kernel.domain)
    }

    fn metric_jet(&self, z: &CPoint) -> Result<MetricJet> {
        let mj = metric_jet_from_potential(self.dim(), &self.kernel.log_kernel_jet(z)?);
        if !mj.h.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
            return Err(Error::Degenerate("non-finite Bergman metric".into()));
        }
        Ok(mj)
    }

    fn label(&self) -> String {
        let how = match self.kernel.kind {
            KernelKind::Numerical(_) => "numerical",
            _ => "closed-form",
        };
        format!("bergman({}, {how})", self.kernel.domain.label())
    }
}

/// `g_B(z; v) = g_{αβ̄} v^α v̄^β`.
pub fn bergman_metric(field: &BergmanMetricField, z: &CPoint, v: &CTangent) -> Result<f64> {
    check_nonzero(v)?;
    let g = field.norm_sqr(z, v)?;
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::Degenerate(format!("Bergman metric value {g} is not positive")));
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub sec: f64,
    pub ric: f64,
    pub scal: f64,
    pub point: CPoint,
    pub direction: CTangent,
    pub convention: String,
}

impl CurvatureReport {
    /// Containment in the bracket for a squeezing lower bound `s`.
    /// A lower bound only widens the bracket, so this stays valid.
    pub fn within(&self, s: f64, n: usize, tol: f64) -> Result<bool> {
        let b = zhang_bounds(n, s)?;
        let inside = |x: f64, lo: f64, hi: f64| x >= lo - tol && x <= hi + tol;
        Ok(inside(self.sec, b.sec_lo, b.sec_hi) && inside(self.ric, b.ric_lo, b.ric_hi) && inside(self.scal, b.scal_lo, b.scal_hi))
    }
}

pub const CURVATURE_CONVENTION: &str = "theorem-3.1";

/// Holomorphic sectional, Ricci and scalar curvature of any Kähler field.
pub fn kahler_curvatures(field: &dyn KahlerMetricField, z: &CPoint, v: &CTangent) -> Result<CurvatureReport> {
    check_nonzero(v)?;
    let mj = field.metric_jet(z)?;
    let t = CurvatureTensor::from_jet(&mj)?;
    let sec = hsc_of_tensor(&t, &mj.h, &v.coords);
    let ric_m = t.ricci(&mj.h)?;
    let g = mj.quad(&v.coords);
    let ric = quad(&ric_m, &v.coords, &v.coords).re / g;
    let inv = mj.h.clone().try_inverse().ok_or_else(|| Error::Degenerate("singular metric".into()))?;
    let scal = (inv * ric_m).trace().re;
    if !(sec.is_finite() && ric.is_finite() && scal.is_finite()) {
        return Err(Error::Degenerate("non-finite curvature".into()));
    }
    Ok(CurvatureReport {
        sec,
        ric,
        scal,
        point: z.clone(),
        direction: v.clone(),
        convention: CURVATURE_CONVENTION.into(),
    })
}

pub fn bergman_curvatures(field: &BergmanMetricField, z: &CPoint, v: &CTangent) -> Result<CurvatureReport> {
    kahler_curvatures(field, z, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZhangBounds {
    pub sec_lo: f64,
    pub sec_hi: f64,
    pub ric_lo: f64,
    pub ric_hi: f64,
    pub scal_lo: f64,
    pub scal_hi: f64,
}

/// Curvature bracket for the Bergman metric in terms of the squeezing function `s`.
pub fn zhang_bounds(n: usize, s: f64) -> Result<ZhangBounds> {
    if n == 0 {
        return Err(Error::Input("dimension must be at least 1".into()));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Input(format!("squeezing value {s} outside (0, 1]")));
    }
    let nf = n as f64;
    let c = 2.0 * (nf + 2.0) / (nf + 1.0);
    Ok(ZhangBounds {
        sec_lo: 2.0 - c * s.powf(-4.0 * nf),
        sec_hi: 2.0 - c * s.powf(4.0 * nf),
        ric_lo: (nf + 1.0) - 2.0 * (nf + 2.0) * s.powf(-2.0 * nf),
        ric_hi: (nf + 1.0) - (nf + 2.0) * s.powf(2.0 * nf),
        scal_lo: nf * (nf + 1.0) - nf * (nf + 2.0) * s.powf(-2.0 * nf),
        scal_hi: nf * (nf + 1.0) - nf * (nf + 2.0) * s.powf(2.0 * nf),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YeungSample {
    pub distance: f64,
    pub kernel: f64,
    /// `K(z, z) d² (-log d)²`.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YeungReport {
    pub samples: Vec<YeungSample>,
    pub infimum: f64,
    pub pass: bool,
}

/// Relative size the innermost scaled value must keep for the lower bound to count as uniform.
pub const YEUNG_DECAY_FLOOR: f64 = 1e-2;

/// `inf K(z, z) d² (-log d)²` along a path approaching the boundary.
///
/// The path must be ordered toward the boundary. It passes when the infimum is
/// positive and the innermost value has not decayed below
/// `YEUNG_DECAY_FLOOR` times the largest value, i.e. no trend to zero.
pub fn yeung_growth_check(kernel: &dyn KernelDiagonal, domain: &DomainSpec, path: &[CPoint]) -> Result<YeungReport> {
    if path.is_empty() {
        return Err(Error::Input("empty path".into()));
    }
    let mut samples = Vec::with_capacity(path.len());
    for z in path {
        let d = domain.boundary_distance(z)?;
        if d >= 1.0 {
            return Err(Error::Input(format!("boundary distance {d} >= 1 makes -log d nonpositive")));
        }
        if d <= 0.0 {
            return Err(Error::Domain("path point on the boundary".into()));
        }
        let k = kernel.kernel_diag(z)?;
        let l = -d.ln();
        samples.push(YeungSample { distance: d, kernel: k, scaled: k * d * d * l * l });
    }
    let infimum = samples.iter().map(|s| s.scaled).fold(f64::INFINITY, f64::min);
    let max = samples.iter().map(|s| s.scaled).fold(0.0, f64::max);
    let inner = samples.iter().min_by(|a, b| a.distance.total_cmp(&b.distance)).map_or(0.0, |s| s.scaled);
    let pass = infimum > 0.0 && inner >= YEUNG_DECAY_FLOOR * max;
    Ok(YeungReport { samples, infimum, pass })
}

/// Points on the ray from the origin along `direction`, at ray-distance `d` before the exit point.
pub fn radial_path(domain: &DomainSpec, direction: &CTangent, distances: &[f64]) -> Result<Vec<CPoint>> {
    check_nonzero(direction)?;
    let origin = CPoint::zeros(domain.dim());
    let exit = domain.ray_exit(&origin, direction)?;
    let len = exit * direction.norm();
    let u = direction.scale_re(1.0 / direction.norm());
    distances
        .iter()
        .map(|&d| {
            if !(d > 0.0 && d < len) {
                return Err(Error::Input(format!("distance {d} not in (0, {len})")));
            }
            Ok(origin.displaced(&u, C64::new(len - d, 0.0)))
        })
        .collect()
}

//! Convex bodies given by oracles: gauge (Minkowski functional) and support function.

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::point::C64;

/// Oracle interface for a bounded convex domain containing the origin.
///
/// `gauge(w) < 1` iff `w` is interior; `support(u) = sup Re<w, u>` over the domain.
pub trait ConvexOracle: Send + Sync + Debug {
    fn dim(&self) -> usize;
    fn gauge(&self, w: &[C64]) -> f64;
    fn support(&self, u: &[C64]) -> f64;

    /// Outward normal direction at a boundary point (not normalized).
    /// Default: central differences of the gauge.
    fn normal(&self, w: &[C64]) -> Vec<C64> {
        let h = 1e-7 * (1.0 + crate::point::norm_sqr(w).sqrt());
        let mut out = Vec::with_capacity(w.len());
        for k in 0..w.len() {
            let mut g = [0.0; 2];
            for (slot, dir) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].into_iter().enumerate() {
                let mut p = w.to_vec();
                let mut m = w.to_vec();
                p[k] += dir * h;
                m[k] -= dir * h;
                g[slot] = (self.gauge(&p) - self.gauge(&m)) / (2.0 * h);
            }
            out.push(C64::new(g[0], g[1]));
        }
        out
    }

    /// True when membership depends only on the moduli `|w_j|`.
    fn is_reinhardt(&self) -> bool {
        false
    }

    /// Serializable description, when the oracle belongs to a built-in family.
    fn family(&self) -> Option<ConvexFamily> {
        None
    }
}

/// Built-in serializable convex families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConvexFamily {
    /// `sum_j (|w_j| / a_j)^{2p} < 1`, with `p >= 1`. `p = 1` is the complex ellipsoid.
    PowerEllipsoid { semiaxes: Vec<f64>, exponent: f64 },
    /// `U(D)` for a unitary `U` given row-major as `(re, im)` pairs.
    Rotated { inner: Box<crate::geometry::DomainDescriptor>, unitary: Vec<Vec<[f64; 2]>> },
}

impl ConvexFamily {
    pub fn build(&self) -> crate::Result<Arc<dyn ConvexOracle>> {
        match self {
            ConvexFamily::PowerEllipsoid { semiaxes, exponent } => {
                Ok(Arc::new(PowerEllipsoid::new(semiaxes.clone(), *exponent)?))
            }
            ConvexFamily::Rotated { inner, unitary } => {
                let inner = crate::geometry::DomainSpec::from_descriptor(inner)?;
                let n = unitary.len();
                if unitary.iter().any(|row| row.len() != n) {
                    return Err(crate::Error::Input("unitary must be square".into()));
                }
                let u = DMatrix::from_fn(n, n, |i, j| C64::new(unitary[i][j][0], unitary[i][j][1]));
                Ok(Arc::new(UnitaryImage::new(inner, u)?))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerEllipsoid {
    semiaxes: Vec<f64>,
    exponent: f64,
}

impl PowerEllipsoid {
    pub fn new(semiaxes: Vec<f64>, exponent: f64) -> crate::Result<Self> {
        if semiaxes.is_empty() || semiaxes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(crate::Error::Input("semiaxes must be positive".into()));
        }
        if !(exponent.is_finite() && exponent >= 1.0) {
            return Err(crate::Error::Input("power-ellipsoid exponent must be >= 1".into()));
        }
        Ok(Self { semiaxes, exponent })
    }
}

impl ConvexOracle for PowerEllipsoid {
    fn dim(&self) -> usize {
        self.semiaxes.len()
    }

    fn gauge(&self, w: &[C64]) -> f64 {
        let q = 2.0 * self.exponent;
        let s: f64 = w
            .iter()
            .zip(&self.semiaxes)
            .map(|(x, a)| (x.norm() / a).powf(q))
            .sum();
        s.powf(1.0 / q)
    }

    fn support(&self, u: &[C64]) -> f64 {
        // Dual norm of the weighted l_{2p} norm on the moduli.
        let q = 2.0 * self.exponent;
        let dual = q / (q - 1.0);
        let s: f64 = u
            .iter()
            .zip(&self.semiaxes)
            .map(|(x, a)| (a * x.norm()).powf(dual))
            .sum();
        s.powf(1.0 / dual)
    }

    fn normal(&self, w: &[C64]) -> Vec<C64> {
        let q = 2.0 * self.exponent;
        w.iter()
            .zip(&self.semiaxes)
            .map(|(x, a)| {
                let m = x.norm();
                if m == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    x * (m.powf(q - 2.0) / a.powf(q))
                }
            })
            .collect()
    }

    fn is_reinhardt(&self) -> bool {
        true
    }

    fn family(&self) -> Option<ConvexFamily> {
        Some(ConvexFamily::PowerEllipsoid {
            semiaxes: self.semiaxes.clone(),
            exponent: self.exponent,
        })
    }
}

/// Image `U(D)` of a convex domain under a unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitaryImage {
    inner: crate::geometry::DomainSpec,
    unitary: DMatrix<C64>,
}

impl UnitaryImage {
    pub fn new(inner: crate::geometry::DomainSpec, unitary: DMatrix<C64>) -> crate::Result<Self> {
        let n = inner.dim();
        if unitary.nrows() != n || unitary.ncols() != n {
            return Err(crate::Error::Input("unitary has wrong shape".into()));
        }
        let defect = (&unitary.adjoint() * &unitary - DMatrix::<C64>::identity(n, n)).norm();
        if defect > 1e-10 {
            return Err(crate::Error::Input(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(Self { inner, unitary })
    }

    fn pull(&self, w: &[C64]) -> Vec<C64> {
        let v = nalgebra::DVector::from_column_slice(w);
        (self.unitary.adjoint() * v).iter().copied().collect()
    }
}

impl ConvexOracle for UnitaryImage {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn gauge(&self, w: &[C64]) -> f64 {
        self.inner.gauge(&self.pull(w))
    }

    fn support(&self, u: &[C64]) -> f64 {
        self.inner.support(&self.pull(u))
    }

    fn family(&self) -> Option<ConvexFamily> {
        let inner = self.inner.descriptor()?;
        let n = self.unitary.nrows();
        let unitary =
            (0..n).map(|i| (0..n).map(|j| [self.unitary[(i, j)].re, self.unitary[(i, j)].im]).collect()).collect();
        Some(ConvexFamily::Rotated { inner: Box::new(inner), unitary })
    }
}


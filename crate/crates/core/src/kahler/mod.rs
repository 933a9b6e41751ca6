//! Kähler (and Hermitian) metric fields on domains in C^n and their curvature.

mod checks;
mod fields;
mod tensor;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::point::{CPoint, CTangent, C64};

pub use checks::{
    hsc, hsc_of_tensor, pinching_constants_check, polarization_check, real_sectional, PinchingReport,
    PolarizationResiduals, RealSectional,
};
pub use fields::{FdMatrixField, MatrixJetField, PotentialField};
pub(crate) use fields::metric_jet_from_potential;
pub use tensor::{CurvatureTensor, TensorDump};

/// Metric matrix `H[i][j] = h_{i j̄}` and its first and mixed second derivatives at a point.
///
/// `dh[k]` is `∂_k H`, `dhb[l]` is `∂̄_l H`, `ddh[k][l]` is `∂_k ∂̄_l H`.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub h: DMatrix<C64>,
    pub dh: Vec<DMatrix<C64>>,
    pub dhb: Vec<DMatrix<C64>>,
    pub ddh: Vec<Vec<DMatrix<C64>>>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// `h(v, v̄) = sum h_{i j̄} v^i conj(v^j)`.
    pub fn quad(&self, v: &[C64]) -> f64 {
        quad(&self.h, v, v).re
    }

    pub fn add_scaled(&self, other: &MetricJet, s: f64) -> MetricJet {
        let n = self.dim();
        MetricJet {
            h: &self.h + &other.h * C64::new(s, 0.0),
            dh: (0..n).map(|k| &self.dh[k] + &other.dh[k] * C64::new(s, 0.0)).collect(),
            dhb: (0..n).map(|k| &self.dhb[k] + &other.dhb[k] * C64::new(s, 0.0)).collect(),
            ddh: (0..n)
                .map(|k| (0..n).map(|l| &self.ddh[k][l] + &other.ddh[k][l] * C64::new(s, 0.0)).collect())
                .collect(),
        }
    }

    /// Restores exact Hermitian symmetry lost to rounding.
    fn hermitize(&mut self) {
        let n = self.dim();
        self.h = (&self.h + self.h.adjoint()) * C64::new(0.5, 0.0);
        for k in 0..n {
            // ∂̄_k H = (∂_k H)^*
            let avg = (&self.dh[k] + self.dhb[k].adjoint()) * C64::new(0.5, 0.0);
            self.dhb[k] = avg.adjoint();
            self.dh[k] = avg;
        }
        for k in 0..n {
            for l in k..n {
                // (∂_k ∂̄_l H)^* = ∂_l ∂̄_k H
                let avg = (&self.ddh[k][l] + self.ddh[l][k].adjoint()) * C64::new(0.5, 0.0);
                self.ddh[l][k] = avg.adjoint();
                self.ddh[k][l] = avg;
            }
        }
    }
}

/// `sum M[i][j] x^i conj(y^j)`.
pub fn quad(m: &DMatrix<C64>, x: &[C64], y: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..x.len() {
        for j in 0..y.len() {
            acc += m[(i, j)] * x[i] * y[j].conj();
        }
    }
    acc
}

/// A Hermitian metric field `h_{i j̄}(z)`; Kähler when it comes from a potential.
pub trait KahlerMetricField: Send + Sync {
    fn dim(&self) -> usize;

    /// Host domain, used for containment checks and sampling.
    fn domain(&self) -> Option<&DomainSpec>;

    fn metric_jet(&self, z: &CPoint) -> Result<MetricJet>;

    fn metric(&self, z: &CPoint) -> Result<DMatrix<C64>> {
        Ok(self.metric_jet(z)?.h)
    }

    /// `h(z; v) = h_{i j̄} v^i v̄^j`.
    fn norm_sqr(&self, z: &CPoint, v: &CTangent) -> Result<f64> {
        let h = self.metric(z)?;
        Ok(quad(&h, &v.coords, &v.coords).re)
    }

    fn label(&self) -> String;

    fn curvature_tensor(&self, z: &CPoint) -> Result<CurvatureTensor> {
        CurvatureTensor::from_jet(&self.metric_jet(z)?)
    }
}

pub(crate) fn check_point(domain: Option<&DomainSpec>, n: usize, z: &CPoint) -> Result<()> {
    crate::point::check_dim(n, z.dim(), "point")?;
    if let Some(d) = domain {
        if !d.contains(z)? {
            return Err(Error::Domain(format!("point outside {}", d.label())));
        }
    }
    Ok(())
}

/// `-log(l^2 - |z|^2)` type potentials and the standard metrics built from them.
pub mod models {
    use std::sync::Arc;

    use super::*;
    use crate::jet::{norm_sqr_jet, Jet};

    /// Euclidean metric `h = Id`.
    pub fn flat(n: usize) -> PotentialField {
        PotentialField::new(n, None, "flat", Arc::new(|z: &[Jet], zb: &[Jet]| norm_sqr_jet(z, zb)))
    }

    /// Poincaré metric `(1 - |z|^2)^{-2} dz dz̄` on the unit disk (curvature -4 in the
    /// Gaussian normalization).
    pub fn poincare_disk() -> PotentialField {
        PotentialField::new(
            1,
            Some(DomainSpec::unit_disk()),
            "poincare-disk",
            Arc::new(|z: &[Jet], zb: &[Jet]| {
                let t = norm_sqr_jet(z, zb);
                -&(&Jet::real(t.space(), 1.0) - &t).ln()
            }),
        )
    }

    /// Bergman metric of `B(0, radius)`: potential `(n+1) * -log(radius^2 - |z|^2)`.
    pub fn ball_bergman(n: usize, radius: f64) -> PotentialField {
        let dom = DomainSpec::ball(n, radius).expect("valid ball");
        let c = (n + 1) as f64;
        PotentialField::new(
            n,
            Some(dom),
            "ball-bergman",
            Arc::new(move |z: &[Jet], zb: &[Jet]| {
                let t = norm_sqr_jet(z, zb);
                (&Jet::real(t.space(), radius * radius) - &t).ln().scale(C64::new(-c, 0.0))
            }),
        )
    }

    /// Product of scaled Poincaré metrics: potential `-sum weight * log(1 - |z_j|^2 / r_j^2)`.
    pub fn polydisk_product(radii: Vec<f64>, weight: f64) -> PotentialField {
        let dom = DomainSpec::polydisk(radii.clone()).expect("valid polydisk");
        PotentialField::new(
            radii.len(),
            Some(dom),
            "polydisk-product",
            Arc::new(move |z: &[Jet], zb: &[Jet]| {
                let s = z[0].space();
                let mut acc = Jet::real(s, 0.0);
                for (j, r) in radii.iter().enumerate() {
                    let t = (&z[j] * &zb[j]).scale(C64::new(1.0 / (r * r), 0.0));
                    acc = &acc - &(&Jet::real(s, 1.0) - &t).ln().scale(C64::new(weight, 0.0));
                }
                acc
            }),
        )
    }

    /// Bergman metric of the polydisk (twice the Poincaré product).
    pub fn polydisk_bergman(radii: Vec<f64>) -> PotentialField {
        let mut f = polydisk_product(radii, 2.0);
        f.set_label("polydisk-bergman");
        f
    }

    /// Ball Bergman potential plus a small non-radial perturbation; Kähler, not
    /// of constant curvature. Positive definite for `|z| < 0.8` when `eps <= 0.2`.
    pub fn perturbed_ball(n: usize, eps: f64) -> PotentialField {
        let dom = DomainSpec::ball(n, 1.0).expect("valid ball");
        let c = (n + 1) as f64;
        PotentialField::new(
            n,
            Some(dom),
            "perturbed-ball",
            Arc::new(move |z: &[Jet], zb: &[Jet]| {
                let s = z[0].space();
                let t = norm_sqr_jet(z, zb);
                let base = (&Jet::real(s, 1.0) - &t).ln().scale(C64::new(-c, 0.0));
                let last = z.len() - 1;
                // |z_0|^2 |z_last|^2 + Re(z_0^2 z̄_last)
                let quartic = &(&z[0] * &zb[0]) * &(&z[last] * &zb[last]);
                let cubic = &(&z[0] * &z[0]) * &zb[last];
                let re = (&cubic + &cubic.conj()).scale(C64::new(0.5, 0.0));
                &base + &(&quartic + &re).scale(C64::new(eps, 0.0))
            }),
        )
    }

    /// Conformally flat Hermitian metric `e^{a|z|^2} Id` (not Kähler for `n >= 2`).
    pub fn conformal_exp(n: usize, a: f64, domain: Option<DomainSpec>) -> MatrixJetField {
        MatrixJetField::new(
            n,
            domain,
            "conformal-exp",
            Arc::new(move |z: &[Jet], zb: &[Jet]| {
                let e = norm_sqr_jet(z, zb).scale(C64::new(a, 0.0)).exp();
                let zero = Jet::real(e.space(), 0.0);
                let n = z.len();
                (0..n)
                    .map(|i| (0..n).map(|j| if i == j { e.clone() } else { zero.clone() }).collect())
                    .collect()
            }),
        )
    }
}

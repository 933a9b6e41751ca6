//! Strongly pseudoconvex complex Finsler metrics `G(z; v)` and the holomorphic
//! sectional curvature of their Chern-Finsler connection.
//!
//! Curvatures here use the Gaussian normalization `K = -(2/λ) ∂∂̄ log λ`
//! for the pulled-back disc metric `λ |dζ|^2`, in which the Poincaré disk has
//! curvature -4. This is twice the `R/h^2` value reported by the Kähler module.

mod curvature;
mod explicit;
mod models;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::point::{check_dim, check_nonzero, CPoint, CTangent, C64};

pub use curvature::{
    disc_curvature, hsc_chern_finsler, hsc_disc_lower, levi_matrix, strong_pseudoconvexity_check,
    PseudoconvexityReport,
};
pub use explicit::ExplicitFamily;
pub use models::{HermitianModel, SumModel};

/// First derivatives and the mixed second derivatives of `G` at `(z, v)`.
///
/// Naming: `gz[i] = ∂G/∂z_i`, `gzb[j] = ∂G/∂z̄_j`, `gzzb[(i, j)] = ∂²G/∂z_i∂z̄_j`,
/// `gzvb[(μ, β)] = ∂²G/∂z_μ∂v̄_β`, `gzbv[(ν, α)] = ∂²G/∂z̄_ν∂v_α`,
/// `gvvb[(α, β)] = ∂²G/∂v_α∂v̄_β` (the Levi matrix).
#[derive(Debug, Clone)]
pub struct WirtingerDerivatives {
    pub g: f64,
    pub gz: Vec<C64>,
    pub gzb: Vec<C64>,
    pub gv: Vec<C64>,
    pub gvb: Vec<C64>,
    pub gzzb: DMatrix<C64>,
    pub gzvb: DMatrix<C64>,
    pub gzbv: DMatrix<C64>,
    pub gvvb: DMatrix<C64>,
}

impl WirtingerDerivatives {
    pub fn zeros(n: usize) -> Self {
        let z = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        let zv = vec![C64::new(0.0, 0.0); n];
        Self {
            g: 0.0,
            gz: zv.clone(),
            gzb: zv.clone(),
            gv: zv.clone(),
            gvb: zv,
            gzzb: z.clone(),
            gzvb: z.clone(),
            gzbv: z.clone(),
            gvvb: z,
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        let sc = C64::new(s, 0.0);
        let add = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x + y * sc).collect::<Vec<_>>();
        Self {
            g: self.g + s * other.g,
            gz: add(&self.gz, &other.gz),
            gzb: add(&self.gzb, &other.gzb),
            gv: add(&self.gv, &other.gv),
            gvb: add(&self.gvb, &other.gvb),
            gzzb: &self.gzzb + &other.gzzb * sc,
            gzvb: &self.gzvb + &other.gzvb * sc,
            gzbv: &self.gzbv + &other.gzbv * sc,
            gvvb: &self.gvvb + &other.gvvb * sc,
        }
    }

    /// Largest relative discrepancy between two derivative sets.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = ((self.g - other.g) / self.g.abs().max(1e-300)).abs();
        let vecs = [(&self.gz, &other.gz), (&self.gzb, &other.gzb), (&self.gv, &other.gv), (&self.gvb, &other.gvb)];
        for (a, b) in vecs {
            let scale = a.iter().map(|x| x.norm()).fold(self.g.abs(), f64::max);
            for (x, y) in a.iter().zip(b.iter()) {
                worst = worst.max((x - y).norm() / scale);
            }
        }
        let mats = [
            (&self.gzzb, &other.gzzb),
            (&self.gzvb, &other.gzvb),
            (&self.gzbv, &other.gzbv),
            (&self.gvvb, &other.gvvb),
        ];
        for (a, b) in mats {
            let scale = a.norm().max(self.g.abs());
            worst = worst.max((a - b).norm() / scale);
        }
        worst
    }
}

/// A complex Finsler metric on (a domain in) C^n.
pub trait FinslerMetricModel: Send + Sync {
    fn dim(&self) -> usize;

    fn domain(&self) -> Option<&DomainSpec>;

    /// `G(z; v)`, with no checks beyond what the formula needs.
    fn eval_unchecked(&self, z: &CPoint, v: &CTangent) -> f64;

    /// Closed-form derivatives when the model has them.
    fn closed_form_derivatives(&self, _z: &CPoint, _v: &CTangent) -> Option<Result<WirtingerDerivatives>> {
        None
    }

    fn label(&self) -> String;

    fn eval(&self, z: &CPoint, v: &CTangent) -> Result<f64> {
        self.check_point(z)?;
        check_dim(self.dim(), v.dim(), "vector")?;
        Ok(self.eval_unchecked(z, v))
    }

    fn check_point(&self, z: &CPoint) -> Result<()> {
        check_dim(self.dim(), z.dim(), "point")?;
        if let Some(d) = self.domain() {
            if !d.contains(z)? {
                return Err(Error::Domain(format!("point outside {}", d.label())));
            }
        }
        Ok(())
    }

    /// Closed form when available, finite differences otherwise. Rejects `v = 0`.
    fn derivatives(&self, z: &CPoint, v: &CTangent) -> Result<WirtingerDerivatives> {
        self.check_point(z)?;
        check_dim(self.dim(), v.dim(), "vector")?;
        check_nonzero(v)?;
        match self.closed_form_derivatives(z, v) {
            Some(r) => r,
            None => Ok(fd_derivatives(|a, b| self.eval_unchecked(a, b), z, v)),
        }
    }
}

/// Central-difference Wirtinger derivatives of a real function of `(z, v)`.
///
/// First derivatives use step `1e-5` scaled by coordinate magnitude. Mixed
/// second derivatives use a Richardson-extrapolated four-point stencil with
/// base step `2e-3`, which keeps both truncation and rounding near `1e-10`.
pub fn fd_derivatives<F: Fn(&CPoint, &CTangent) -> f64>(f: F, z: &CPoint, v: &CTangent) -> WirtingerDerivatives {
    let n = z.dim();
    // Real coordinates: [Re z_0, Im z_0, ..., Re v_0, Im v_0, ...].
    let mut x0 = z.to_real_pairs();
    x0.extend(v.to_real_pairs());
    let eval = |x: &[f64]| f(&CPoint::from_real_pairs(&x[..2 * n]), &CTangent::from_real_pairs(&x[2 * n..]));
    let scale = |k: usize| x0[k].abs().max(1.0);
    let first = |k: usize| {
        let h = 1e-5 * scale(k);
        let mut p = x0.clone();
        let mut m = x0.clone();
        p[k] += h;
        m[k] -= h;
        (eval(&p) - eval(&m)) / (2.0 * h)
    };
    let mixed_h = |a: usize, b: usize, h: f64| {
        let ha = h * scale(a);
        let hb = h * scale(b);
        let at = |sa: f64, sb: f64| {
            let mut p = x0.clone();
            p[a] += sa * ha;
            p[b] += sb * hb;
            eval(&p)
        };
        (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * ha * hb)
    };
    let mixed = |a: usize, b: usize| {
        let d1 = mixed_h(a, b, 2e-3);
        let d2 = mixed_h(a, b, 1e-3);
        (4.0 * d2 - d1) / 3.0
    };
    let wirt1 = |k: usize| -> (C64, C64) {
        let dx = first(2 * k);
        let dy = first(2 * k + 1);
        (C64::new(0.5 * dx, -0.5 * dy), C64::new(0.5 * dx, 0.5 * dy))
    };
    // ∂_a ∂̄_b = 1/4 [(xx + yy) + i (x_a y_b - y_a x_b)]
    let wirt2 = |a: usize, b: usize| -> C64 {
        let xx = mixed(2 * a, 2 * b);
        let yy = mixed(2 * a + 1, 2 * b + 1);
        let xy = mixed(2 * a, 2 * b + 1);
        let yx = mixed(2 * a + 1, 2 * b);
        C64::new(0.25 * (xx + yy), 0.25 * (xy - yx))
    };
    let mut d = WirtingerDerivatives::zeros(n);
    d.g = eval(&x0);
    for k in 0..n {
        let (a, b) = wirt1(k);
        d.gz[k] = a;
        d.gzb[k] = b;
        let (a, b) = wirt1(n + k);
        d.gv[k] = a;
        d.gvb[k] = b;
    }
    for i in 0..n {
        for j in 0..n {
            d.gzzb[(i, j)] = wirt2(i, j);
            d.gzvb[(i, j)] = wirt2(i, n + j);
            d.gzbv[(i, j)] = wirt2(n + j, i);
            d.gvvb[(i, j)] = wirt2(n + i, n + j);
        }
    }
    d
}

/// How a curvature value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureMethod {
    ChernFinsler,
    LinearDisc,
    PolynomialDisc,
    KahlerTensor,
}

/// One curvature record for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureRecord {
    pub point: CPoint,
    pub vector: CTangent,
    pub value: f64,
    pub method: CurvatureMethod,
}

#[cfg(test)]
mod tests;

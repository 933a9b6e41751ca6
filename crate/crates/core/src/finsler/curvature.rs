use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FinslerMetricModel, WirtingerDerivatives};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::optim::nelder_mead;
use crate::point::{check_nonzero, CPoint, CTangent, C64};
use crate::sampling::point_vector_pairs;

/// `G_{α β̄} = ∂²G/∂v^α∂v̄^β` at `(z, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeviMatrix {
    pub entries: DMatrix<C64>,
}

impl LeviMatrix {
    pub fn hermitian_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).norm() / self.entries.norm().max(1e-300)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

pub fn levi_matrix(model: &dyn FinslerMetricModel, z: &CPoint, v: &CTangent) -> Result<LeviMatrix> {
    Ok(LeviMatrix { entries: model.derivatives(z, v)?.gvvb })
}

/// Chern-Finsler holomorphic sectional curvature from the derivatives of `G`:
///
/// `K = (2/G²) [ -v^μ v̄^ν G_{μ ν̄} + A_β G^{β α} B_α ]`, with
/// `A_β = v^μ ∂²G/∂z_μ∂v̄_β`, `B_α = v̄^ν ∂²G/∂z̄_ν∂v_α` and `G^{β α}` the inverse Levi matrix.
pub fn hsc_from_derivatives(d: &WirtingerDerivatives, v: &[C64]) -> Result<f64> {
    let n = v.len();
    let inv = d
        .gvvb
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular Levi matrix".into()))?;
    let mut horizontal = C64::new(0.0, 0.0);
    for m in 0..n {
        for k in 0..n {
            horizontal += v[m] * v[k].conj() * d.gzzb[(m, k)];
        }
    }
    let a: Vec<C64> = (0..n).map(|be| (0..n).map(|m| v[m] * d.gzvb[(m, be)]).sum()).collect();
    let b: Vec<C64> = (0..n).map(|al| (0..n).map(|k| v[k].conj() * d.gzbv[(k, al)]).sum()).collect();
    let mut vertical = C64::new(0.0, 0.0);
    for be in 0..n {
        for al in 0..n {
            vertical += a[be] * inv[(be, al)] * b[al];
        }
    }
    let k = 2.0 / (d.g * d.g) * (-horizontal + vertical).re;
    if !k.is_finite() {
        return Err(Error::Degenerate("non-finite curvature".into()));
    }
    Ok(k)
}

pub fn hsc_chern_finsler(model: &dyn FinslerMetricModel, z: &CPoint, v: &CTangent) -> Result<f64> {
    let d = model.derivatives(z, v)?;
    hsc_from_derivatives(&d, &v.coords)
}

const DISC_STEP: f64 = 1e-2;

/// Gaussian curvature at 0 of `φ^*G` for `φ(ζ) = z + ζ w1 + ζ² w2`:
/// `K = -(2/λ) ∂∂̄ log λ` with `λ(ζ) = G(φ(ζ), φ'(ζ))`, the Laplacian taken by a
/// fourth-order five-point stencil in each real direction.
pub fn disc_curvature(model: &dyn FinslerMetricModel, z: &CPoint, w1: &CTangent, w2: &CTangent) -> Result<f64> {
    let h = DISC_STEP;
    let log_lambda = |zeta: C64| -> Result<f64> {
        let p = CPoint::new(
            (0..z.dim())
                .map(|k| z.coords[k] + zeta * w1.coords[k] + zeta * zeta * w2.coords[k])
                .collect(),
        );
        let dp = CTangent::new((0..z.dim()).map(|k| w1.coords[k] + 2.0 * zeta * w2.coords[k]).collect());
        let lam = model.eval(&p, &dp)?;
        if !(lam > 0.0) {
            return Err(Error::Degenerate("pulled-back metric vanishes".into()));
        }
        Ok(lam.ln())
    };
    let f0 = log_lambda(C64::new(0.0, 0.0))?;
    let mut lap = 0.0;
    for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
        let fp1 = log_lambda(dir * h)?;
        let fm1 = log_lambda(-dir * h)?;
        let fp2 = log_lambda(dir * (2.0 * h))?;
        let fm2 = log_lambda(-dir * (2.0 * h))?;
        lap += (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    }
    let lambda = f0.exp();
    // ∂∂̄ = Δ/4
    Ok(-2.0 / lambda * lap / 4.0)
}

/// Disc scale: the linear disc `z + ζ σ v̂` stays inside for `|ζ| < 2`.
fn disc_scale(model: &dyn FinslerMetricModel, z: &CPoint, unit: &CTangent) -> Result<f64> {
    Ok(match model.domain() {
        Some(d) => (0.5 * d.disc_radius(z, unit)?).min(1.0),
        None => 1.0,
    })
}

/// Lower bound for the holomorphic sectional curvature from the supremum
/// characterization over holomorphic discs through `z` tangent to `v`.
///
/// Degree 1 uses the linear disc only; degree >= 2 also maximizes over the
/// quadratic coefficient (higher coefficients do not affect the curvature at 0).
pub fn hsc_disc_lower(model: &dyn FinslerMetricModel, z: &CPoint, v: &CTangent, disc_degree: usize) -> Result<f64> {
    model.check_point(z)?;
    check_nonzero(v)?;
    let unit = v.scale_re(1.0 / v.norm());
    let sigma = disc_scale(model, z, &unit)?;
    let w1 = unit.scale_re(sigma);
    let zero = CTangent::zeros(z.dim());
    let linear = disc_curvature(model, z, &w1, &zero)?;
    if disc_degree < 2 {
        return Ok(linear);
    }
    let n = z.dim();
    let objective = |x: &[f64]| -> f64 {
        let w2 = CTangent::from_real_pairs(x).scale_re(sigma * sigma);
        match disc_curvature(model, z, &w1, &w2) {
            Ok(k) => -k,
            Err(_) => f64::INFINITY,
        }
    };
    let mut best = linear;
    let mut x0 = vec![0.0; 2 * n];
    for _ in 0..3 {
        let r = nelder_mead(&objective, &x0, 0.2, 2000, 1e-14);
        if -r.value > best {
            best = -r.value;
        }
        x0 = r.x;
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoconvexityReport {
    pub samples: usize,
    pub seed: u64,
    pub min_eigenvalue: f64,
    pub worst_point: CPoint,
    pub worst_vector: CTangent,
    pub max_hermitian_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Smallest Levi eigenvalue over the origin plus `sample_count` seeded samples.
pub fn strong_pseudoconvexity_check(
    model: &dyn FinslerMetricModel,
    domain: &DomainSpec,
    sample_count: usize,
    seed: u64,
    tolerance: f64,
) -> Result<PseudoconvexityReport> {
    if sample_count == 0 {
        return Err(Error::Input("sample_count must be >= 1".into()));
    }
    let mut pairs = vec![(CPoint::zeros(domain.dim()), CTangent::basis(domain.dim(), 0))];
    pairs.extend(point_vector_pairs(domain, sample_count, 0.999, seed));
    let evals: Vec<Result<(f64, f64)>> = pairs
        .par_iter()
        .map(|(z, v)| {
            let l = levi_matrix(model, z, v)?;
            Ok((l.min_eigenvalue(), l.hermitian_defect()))
        })
        .collect();
    let mut worst = (f64::INFINITY, 0);
    let mut defect: f64 = 0.0;
    for (i, e) in evals.into_iter().enumerate() {
        let (m, d) = e?;
        defect = defect.max(d);
        if m < worst.0 || m.is_nan() {
            worst = (m, i);
        }
    }
    Ok(PseudoconvexityReport {
        samples: pairs.len(),
        seed,
        min_eigenvalue: worst.0,
        worst_point: pairs[worst.1].0.clone(),
        worst_vector: pairs[worst.1].1.clone(),
        max_hermitian_defect: defect,
        tolerance,
        pass: worst.0 > tolerance,
    })
}

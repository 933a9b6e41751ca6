use std::sync::Arc;

use crate::error::Result;
use crate::geometry::DomainSpec;
use crate::kahler::{quad, KahlerMetricField};
use crate::point::{CPoint, CTangent, C64};

use super::{FinslerMetricModel, WirtingerDerivatives};

/// `G(z; v) = scale * h_{i j̄}(z) v^i v̄^j` for a Hermitian field `h`.
#[derive(Clone)]
pub struct HermitianModel {
    field: Arc<dyn KahlerMetricField>,
    scale: f64,
    label: String,
}

impl HermitianModel {
    pub fn new(field: Arc<dyn KahlerMetricField>) -> Self {
        let label = field.label();
        Self { field, scale: 1.0, label }
    }

    pub fn scaled(field: Arc<dyn KahlerMetricField>, scale: f64) -> Self {
        let label = format!("{}*{}", scale, field.label());
        Self { field, scale, label }
    }

    pub fn field(&self) -> &Arc<dyn KahlerMetricField> {
        &self.field
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The Poincaré metric of the unit disk.
    pub fn poincare() -> Self {
        Self::new(Arc::new(crate::kahler::models::poincare_disk()))
    }

    /// The Euclidean metric on a domain.
    pub fn flat(domain: &DomainSpec) -> Self {
        let mut f = crate::kahler::models::flat(domain.dim());
        f.set_domain(Some(domain.clone()));
        Self::new(Arc::new(f))
    }
}

impl FinslerMetricModel for HermitianModel {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn domain(&self) -> Option<&DomainSpec> {
        self.field.domain()
    }

    fn eval_unchecked(&self, z: &CPoint, v: &CTangent) -> f64 {
        self.field.norm_sqr(z, v).map(|x| self.scale * x).unwrap_or(f64::NAN)
    }

    fn closed_form_derivatives(&self, z: &CPoint, v: &CTangent) -> Option<Result<WirtingerDerivatives>> {
        Some(self.field.metric_jet(z).map(|jet| {
            let n = jet.dim();
            let vc = &v.coords;
            let s = C64::new(self.scale, 0.0);
            let mut d = WirtingerDerivatives::zeros(n);
            d.g = self.scale * jet.quad(vc);
            for k in 0..n {
                d.gz[k] = quad(&jet.dh[k], vc, vc) * s;
                d.gzb[k] = quad(&jet.dhb[k], vc, vc) * s;
                let mut gv = C64::new(0.0, 0.0);
                let mut gvb = C64::new(0.0, 0.0);
                for i in 0..n {
                    // ∂/∂v_k of h_{i j̄} v^i v̄^j is h_{k j̄} v̄^j
                    gv += jet.h[(k, i)] * vc[i].conj();
                    gvb += jet.h[(i, k)] * vc[i];
                }
                d.gv[k] = gv * s;
                d.gvb[k] = gvb * s;
            }
            for a in 0..n {
                for b in 0..n {
                    d.gzzb[(a, b)] = quad(&jet.ddh[a][b], vc, vc) * s;
                    d.gvvb[(a, b)] = jet.h[(a, b)] * s;
                    let mut zvb = C64::new(0.0, 0.0);
                    let mut zbv = C64::new(0.0, 0.0);
                    for i in 0..n {
                        // ∂_{z_a} ∂_{v̄_b}: sum_i ∂_a h_{i b̄} v^i
                        zvb += jet.dh[a][(i, b)] * vc[i];
                        // ∂_{z̄_a} ∂_{v_b}: sum_j ∂̄_a h_{b j̄} v̄^j
                        zbv += jet.dhb[a][(b, i)] * vc[i].conj();
                    }
                    d.gzvb[(a, b)] = zvb * s;
                    d.gzbv[(a, b)] = zbv * s;
                }
            }
            d
        }))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Nonnegative combination `sum c_i G_i` of Finsler metrics on a common domain.
#[derive(Clone)]
pub struct SumModel {
    terms: Vec<(f64, Arc<dyn FinslerMetricModel>)>,
    domain: Option<DomainSpec>,
    label: String,
}

impl SumModel {
    pub fn new(terms: Vec<(f64, Arc<dyn FinslerMetricModel>)>) -> Self {
        let domain = terms.iter().find_map(|(_, m)| m.domain().cloned());
        let label = terms
            .iter()
            .map(|(c, m)| format!("{c}*{}", m.label()))
            .collect::<Vec<_>>()
            .join(" + ");
        Self { terms, domain, label }
    }

    pub fn terms(&self) -> &[(f64, Arc<dyn FinslerMetricModel>)] {
        &self.terms
    }
}

impl FinslerMetricModel for SumModel {
    fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    fn domain(&self) -> Option<&DomainSpec> {
        self.domain.as_ref()
    }

    fn eval_unchecked(&self, z: &CPoint, v: &CTangent) -> f64 {
        self.terms.iter().map(|(c, m)| c * m.eval_unchecked(z, v)).sum()
    }

    fn closed_form_derivatives(&self, z: &CPoint, v: &CTangent) -> Option<Result<WirtingerDerivatives>> {
        let mut acc = WirtingerDerivatives::zeros(self.dim());
        for (c, m) in &self.terms {
            match m.derivatives(z, v) {
                Ok(d) => acc = acc.axpy(*c, &d),
                Err(e) => return Some(Err(e)),
            }
        }
        Some(Ok(acc))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

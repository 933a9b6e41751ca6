//! Metric-spec schema: which metric to put on a domain.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bergman::{BergmanKernelModel, BergmanMetricField};
use crate::error::{Error, Result};
use crate::finsler::{ExplicitFamily, FinslerMetricModel, HermitianModel};
use crate::geometry::{DomainKind, DomainSpec};
use crate::kahler::{models, KahlerMetricField};

/// Degree used for numerical Bergman kernels when none is given.
pub const DEFAULT_KERNEL_DEGREE: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MetricDescriptor {
    /// `|v|² e^{a|z|² + b|<z,v>|²/|v|²}`.
    ExplicitFamily { a: f64, b: f64 },
    /// `e^{a|z|²} |v|²`.
    HermitianDiagonal { a: f64 },
    /// `|v|² / (1 - |z|²)²` on the unit disk.
    Poincare {},
    /// Closed form on balls and polydisks, a truncated kernel of `degree` elsewhere.
    Bergman {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree: Option<usize>,
    },
    Flat {},
}

fn is_unit_disk(d: &DomainSpec) -> bool {
    d.dim() == 1 && matches!(d.kind(), DomainKind::Ball { radius } if *radius == 1.0) && d.recentering().iter().all(|c| c.norm() == 0.0)
}

impl MetricDescriptor {
    pub fn label(&self) -> String {
        match self {
            MetricDescriptor::ExplicitFamily { a, b } => format!("explicit-family(a={a}, b={b})"),
            MetricDescriptor::HermitianDiagonal { a } => format!("hermitian-diagonal(a={a})"),
            MetricDescriptor::Poincare {} => "poincare".into(),
            MetricDescriptor::Bergman { .. } => "bergman".into(),
            MetricDescriptor::Flat {} => "flat".into(),
        }
    }

    /// The Kähler field behind this metric, if it has one.
    pub fn kahler(&self, domain: &DomainSpec) -> Result<Option<Arc<dyn KahlerMetricField>>> {
        Ok(match self {
            MetricDescriptor::Poincare {} => {
                if !is_unit_disk(domain) {
                    return Err(Error::Input(format!("the Poincaré metric needs the unit disk, not {}", domain.label())));
                }
                Some(Arc::new(models::poincare_disk()))
            }
            MetricDescriptor::Bergman { degree } => {
                let k = BergmanKernelModel::for_domain(domain, degree.unwrap_or(DEFAULT_KERNEL_DEGREE))?;
                Some(Arc::new(BergmanMetricField::new(k)))
            }
            MetricDescriptor::Flat {} => {
                let mut f = models::flat(domain.dim());
                f.set_domain(Some(domain.clone()));
                Some(Arc::new(f))
            }
            MetricDescriptor::HermitianDiagonal { a } if domain.dim() == 1 => {
                Some(Arc::new(models::conformal_exp(1, *a, Some(domain.clone()))))
            }
            _ => None,
        })
    }

    pub fn finsler(&self, domain: &DomainSpec) -> Result<Arc<dyn FinslerMetricModel>> {
        match self {
            MetricDescriptor::ExplicitFamily { a, b } => Ok(Arc::new(ExplicitFamily::new(*a, *b, domain.clone())?)),
            MetricDescriptor::HermitianDiagonal { a } => Ok(Arc::new(ExplicitFamily::new(*a, 0.0, domain.clone())?)),
            _ => {
                let field = self.kahler(domain)?.expect("kähler-backed metric");
                Ok(Arc::new(HermitianModel::new(field)))
            }
        }
    }
}

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{check_point, KahlerMetricField, MetricJet};
use crate::error::Result;
use crate::geometry::DomainSpec;
use crate::jet::{coordinates, Jet, JetSpace};
use crate::point::{CPoint, C64};

pub type PotentialFn = Arc<dyn Fn(&[Jet], &[Jet]) -> Jet + Send + Sync>;
pub type MatrixJetFn = Arc<dyn Fn(&[Jet], &[Jet]) -> Vec<Vec<Jet>> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&CPoint) -> DMatrix<C64> + Send + Sync>;

fn zeros(n: usize) -> DMatrix<C64> {
    DMatrix::from_element(n, n, C64::new(0.0, 0.0))
}

/// Kähler metric `h_{i j̄} = ∂_i ∂̄_j φ` from a real potential, differentiated exactly with jets.
#[derive(Clone)]
pub struct PotentialField {
    n: usize,
    domain: Option<DomainSpec>,
    label: String,
    potential: PotentialFn,
    space: Arc<JetSpace>,
}

impl PotentialField {
    pub fn new(n: usize, domain: Option<DomainSpec>, label: &str, potential: PotentialFn) -> Self {
        Self { n, domain, label: label.to_string(), potential, space: JetSpace::new(n, 2, 2) }
    }

    pub fn set_label(&mut self, label: &str) {
        self.label = label.to_string();
    }

    pub fn set_domain(&mut self, domain: Option<DomainSpec>) {
        self.domain = domain;
    }

    pub fn potential_jet(&self, z: &CPoint) -> Jet {
        let (zj, zbj) = coordinates(&self.space, &z.coords);
        (self.potential)(&zj, &zbj)
    }
}

impl KahlerMetricField for PotentialField {
    fn dim(&self) -> usize {
        self.n
    }

    fn domain(&self) -> Option<&DomainSpec> {
        self.domain.as_ref()
    }

    fn metric_jet(&self, z: &CPoint) -> Result<MetricJet> {
        check_point(self.domain.as_ref(), self.n, z)?;
        let phi = self.potential_jet(z);
        Ok(metric_jet_from_potential(self.n, &phi))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `h = ∂∂̄ φ` and its first and mixed second derivatives from a (2,2) jet of `φ`.
pub(crate) fn metric_jet_from_potential(n: usize, phi: &Jet) -> MetricJet {
    let mut h = zeros(n);
    let mut dh = vec![zeros(n); n];
    let mut dhb = vec![zeros(n); n];
    let mut ddh = vec![vec![zeros(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = phi.d(&[i], &[j]);
            for k in 0..n {
                dh[k][(i, j)] = phi.d(&[i, k], &[j]);
                dhb[k][(i, j)] = phi.d(&[i], &[j, k]);
                for l in 0..n {
                    ddh[k][l][(i, j)] = phi.d(&[i, k], &[j, l]);
                }
            }
        }
    }
    let mut mj = MetricJet { h, dh, dhb, ddh };
    mj.hermitize();
    mj
}

/// Hermitian metric given entrywise as jets of order (1,1); need not be Kähler.
#[derive(Clone)]
pub struct MatrixJetField {
    n: usize,
    domain: Option<DomainSpec>,
    label: String,
    entries: MatrixJetFn,
    space: Arc<JetSpace>,
}

impl MatrixJetField {
    pub fn new(n: usize, domain: Option<DomainSpec>, label: &str, entries: MatrixJetFn) -> Self {
        Self { n, domain, label: label.to_string(), entries, space: JetSpace::new(n, 1, 1) }
    }
}

impl KahlerMetricField for MatrixJetField {
    fn dim(&self) -> usize {
        self.n
    }

    fn domain(&self) -> Option<&DomainSpec> {
        self.domain.as_ref()
    }

    fn metric_jet(&self, z: &CPoint) -> Result<MetricJet> {
        check_point(self.domain.as_ref(), self.n, z)?;
        let (zj, zbj) = coordinates(&self.space, &z.coords);
        let e = (self.entries)(&zj, &zbj);
        let n = self.n;
        let mut h = zeros(n);
        let mut dh = vec![zeros(n); n];
        let mut dhb = vec![zeros(n); n];
        let mut ddh = vec![vec![zeros(n); n]; n];
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = e[i][j].value();
                for k in 0..n {
                    dh[k][(i, j)] = e[i][j].d(&[k], &[]);
                    dhb[k][(i, j)] = e[i][j].d(&[], &[k]);
                    for l in 0..n {
                        ddh[k][l][(i, j)] = e[i][j].d(&[k], &[l]);
                    }
                }
            }
        }
        let mut mj = MetricJet { h, dh, dhb, ddh };
        mj.hermitize();
        Ok(mj)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Metric given only pointwise; derivatives by central finite differences.
/// Serves as an independent check on the jet-based fields.
#[derive(Clone)]
pub struct FdMatrixField {
    n: usize,
    domain: Option<DomainSpec>,
    label: String,
    matrix: MatrixFn,
    step: f64,
}

impl FdMatrixField {
    pub fn new(n: usize, domain: Option<DomainSpec>, label: &str, matrix: MatrixFn) -> Self {
        Self { n, domain, label: label.to_string(), matrix, step: 1e-4 }
    }

    /// Wraps any field, discarding its analytic derivatives.
    pub fn from_field<F: KahlerMetricField + Clone + 'static>(field: &F) -> Self {
        let f = field.clone();
        let n = field.dim();
        Self::new(
            n,
            field.domain().cloned(),
            &format!("fd({})", field.label()),
            Arc::new(move |z: &CPoint| f.metric(z).expect("metric at FD stencil point")),
        )
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    fn at(&self, z: &CPoint, shifts: &[(usize, C64)]) -> DMatrix<C64> {
        let mut w = z.clone();
        for (k, d) in shifts {
            w.coords[*k] += d;
        }
        (self.matrix)(&w)
    }
}

impl KahlerMetricField for FdMatrixField {
    fn dim(&self) -> usize {
        self.n
    }

    fn domain(&self) -> Option<&DomainSpec> {
        self.domain.as_ref()
    }

    fn metric(&self, z: &CPoint) -> Result<DMatrix<C64>> {
        check_point(self.domain.as_ref(), self.n, z)?;
        Ok((self.matrix)(z))
    }

    fn metric_jet(&self, z: &CPoint) -> Result<MetricJet> {
        check_point(self.domain.as_ref(), self.n, z)?;
        let n = self.n;
        let h = self.step;
        let re = C64::new(h, 0.0);
        let im = C64::new(0.0, h);
        let half = C64::new(0.5, 0.0);
        let i = C64::new(0.0, 1.0);
        let d = |k: usize, dir: C64| (self.at(z, &[(k, dir)]) - self.at(z, &[(k, -dir)])) / C64::new(2.0 * h, 0.0);
        let mut dh = Vec::with_capacity(n);
        let mut dhb = Vec::with_capacity(n);
        for k in 0..n {
            let a = d(k, re);
            let b = d(k, im);
            dh.push((&a - &b * i) * half);
            dhb.push((&a + &b * i) * half);
        }
        // Real second derivatives d^2/(ds dt) by the four-point stencil.
        let second = |k: usize, dk: C64, l: usize, dl: C64| {
            let pp = self.at(z, &[(k, dk), (l, dl)]);
            let pm = self.at(z, &[(k, dk), (l, -dl)]);
            let mp = self.at(z, &[(k, -dk), (l, dl)]);
            let mm = self.at(z, &[(k, -dk), (l, -dl)]);
            (pp - pm - mp + mm) / C64::new(4.0 * h * h, 0.0)
        };
        let mut ddh = vec![vec![zeros(n); n]; n];
        for k in 0..n {
            for l in 0..n {
                // ∂_k ∂̄_l = 1/4 (∂x_k - i ∂y_k)(∂x_l + i ∂y_l)
                let xx = second(k, re, l, re);
                let yy = second(k, im, l, im);
                let xy = second(k, re, l, im);
                let yx = second(k, im, l, re);
                ddh[k][l] = (xx + yy + (xy - yx) * i) * C64::new(0.25, 0.0);
            }
        }
        let mut mj = MetricJet { h: (self.matrix)(z), dh, dhb, ddh };
        mj.hermitize();
        Ok(mj)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

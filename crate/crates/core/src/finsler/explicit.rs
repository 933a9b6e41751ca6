use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::point::{inner, CPoint, CTangent, C64};

use super::{FinslerMetricModel, WirtingerDerivatives};

/// `G(z; v) = r e^{a t + b s}` with `r = |v|^2`, `t = |z|^2`, `s = |<z, v>|^2 / r`.
#[derive(Debug, Clone)]
pub struct ExplicitFamily {
    a: f64,
    b: f64,
    domain: DomainSpec,
}

impl ExplicitFamily {
    /// Accepts any `a > 0`, `b >= 0`; use [`ExplicitFamily::in_window`] to check
    /// the strong-pseudoconvexity window `b < 1/M0`.
    pub fn new(a: f64, b: f64, domain: DomainSpec) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Input("explicit family needs a > 0".into()));
        }
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::Input("explicit family needs b >= 0".into()));
        }
        Ok(Self { a, b, domain })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn host(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn in_window(&self) -> bool {
        self.b == 0.0 || self.b < 1.0 / self.domain.sup_norm()
    }

    pub fn is_hermitian(&self) -> bool {
        self.b == 0.0
    }
}

impl FinslerMetricModel for ExplicitFamily {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn domain(&self) -> Option<&DomainSpec> {
        Some(&self.domain)
    }

    fn eval_unchecked(&self, z: &CPoint, v: &CTangent) -> f64 {
        let r = v.norm_sqr();
        if r == 0.0 {
            return 0.0;
        }
        let t = z.norm_sqr();
        let s = inner(&z.coords, &v.coords).norm_sqr() / r;
        r * (self.a * t + self.b * s).exp()
    }

    /// Differentiates `L = log G = log r + a t + b p p̄ / r` with `p = <z, v>`,
    /// then `G_X = G L_X`, `G_{X Ȳ} = G (L_{X Ȳ} + L_X L_Ȳ)`.
    fn closed_form_derivatives(&self, z: &CPoint, v: &CTangent) -> Option<Result<WirtingerDerivatives>> {
        let n = z.dim();
        let (a, b) = (self.a, self.b);
        let zc = &z.coords;
        let vc = &v.coords;
        let r = v.norm_sqr();
        let p = inner(zc, vc);
        let pb = p.conj();
        let q = p.norm_sqr();
        let g = self.eval_unchecked(z, v);
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };

        let lz: Vec<C64> = (0..n).map(|i| a * zc[i].conj() + b * vc[i].conj() * pb / r).collect();
        let lzb: Vec<C64> = (0..n).map(|j| a * zc[j] + b * p * vc[j] / r).collect();
        let lv: Vec<C64> = (0..n)
            .map(|al| vc[al].conj() / r + b * (p * zc[al].conj() / r - q * vc[al].conj() / (r * r)))
            .collect();
        let lvb: Vec<C64> = (0..n)
            .map(|be| vc[be] / r + b * (pb * zc[be] / r - q * vc[be] / (r * r)))
            .collect();

        let mut d = WirtingerDerivatives::zeros(n);
        d.g = g;
        for k in 0..n {
            d.gz[k] = lz[k] * g;
            d.gzb[k] = lzb[k] * g;
            d.gv[k] = lv[k] * g;
            d.gvb[k] = lvb[k] * g;
        }
        for i in 0..n {
            for j in 0..n {
                let lzzb = a * delta(i, j) + b * vc[i].conj() * vc[j] / r;
                d.gzzb[(i, j)] = (lzzb + lz[i] * lzb[j]) * g;

                // (μ, β) = (i, j)
                let lzvb = b * (delta(i, j) * pb / r - vc[i].conj() * pb * vc[j] / (r * r));
                d.gzvb[(i, j)] = (lzvb + lz[i] * lvb[j]) * g;

                // (ν, α) = (i, j)
                let lzbv = b * (delta(i, j) * p / r - vc[i] * p * vc[j].conj() / (r * r));
                d.gzbv[(i, j)] = (lzbv + lzb[i] * lv[j]) * g;

                // (α, β) = (i, j)
                let (al, be) = (i, j);
                let lvvb = delta(al, be) / r - vc[al].conj() * vc[be] / (r * r)
                    + b * (zc[be] * zc[al].conj() / r - p * zc[al].conj() * vc[be] / (r * r))
                    - b * (pb * zc[be] * vc[al].conj() / (r * r) + q * delta(al, be) / (r * r)
                        - 2.0 * q * vc[al].conj() * vc[be] / (r * r * r));
                d.gvvb[(al, be)] = (lvvb + lv[al] * lvb[be]) * g;
            }
        }
        Some(Ok(d))
    }

    fn label(&self) -> String {
        format!("explicit(a={}, b={})", self.a, self.b)
    }
}

//! Orthonormal monomial bases under the volume inner product.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{DomainDescriptor, DomainKind, DomainSpec};
use crate::point::C64;
use crate::quadrature::{gauss_legendre_unit, simplex_rule, torus_angles};

/// Relative norm (squared) below which a new monomial is treated as dependent.
const NORM_LOSS_CLIFF: f64 = 1e-12;
/// Largest tolerated `|<f_i, f_j> - δ_ij|` after orthonormalization.
const GRAM_TOL: f64 = 1e-9;

/// Node counts for the volume integrals.
///
/// `radial` is the number of Gauss–Legendre points per simplex axis (or per
/// coordinate on a polydisk); `angular` is the trapezoid count per angle and is
/// only used for domains without circular symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub angular: usize,
}

impl QuadratureSpec {
    /// Exact for monomial norms on balls and polydisks up to `degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self { radial: degree / 2 + 12, angular: 2 * degree + 16 }
    }
}

/// Coefficients of the orthonormal functions in the monomial basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Basis {
    /// Reinhardt domains: monomials are orthogonal, `f_α = z^α / ‖z^α‖`.
    Diagonal { inv_norms: Vec<f64> },
    /// General domains: `f_i = Σ_k coeff[i][k] z^{α_k}`, lower triangular.
    Full { coeff: Vec<Vec<[f64; 2]>> },
}

/// A truncated Bergman kernel `K(z, z) = Σ |f_i(z)|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericalKernel {
    pub dim: usize,
    pub requested_degree: usize,
    /// Highest total degree kept after conditioning checks.
    pub degree: usize,
    pub quadrature: QuadratureSpec,
    pub exponents: Vec<Vec<u16>>,
    pub basis: Basis,
    /// `max |<f_i, f_j> - δ_ij|` under the quadrature inner product.
    pub gram_defect: f64,
    pub warnings: Vec<String>,
}

/// On-disk form, keyed by a hash of the domain, degree and quadrature.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CacheFile {
    hash: String,
    domain: DomainDescriptor,
    kernel: NumericalKernel,
}

/// Monomial exponents of total degree `<= degree`, sorted by degree then lexicographically.
pub fn monomials(n: usize, degree: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut cur = vec![0u16; n];
        fill(&mut out, &mut cur, 0, d as u16);
    }
    out
}

fn fill(out: &mut Vec<Vec<u16>>, cur: &mut Vec<u16>, k: usize, left: u16) {
    if k + 1 == cur.len() {
        cur[k] = left;
        out.push(cur.clone());
        return;
    }
    for a in (0..=left).rev() {
        cur[k] = a;
        fill(out, cur, k + 1, left - a);
    }
}

fn total(a: &[u16]) -> usize {
    a.iter().map(|&x| x as usize).sum()
}

impl NumericalKernel {
    pub fn build(domain: &DomainSpec, max_degree: usize, quad: QuadratureSpec) -> Result<Self> {
        if quad.radial == 0 {
            return Err(Error::Input("quadrature needs at least one radial node".into()));
        }
        let n = domain.dim();
        let exps = monomials(n, max_degree);
        if domain.is_reinhardt() {
            let norms = match domain.kind() {
                DomainKind::Polydisk { radii } => polydisk_norms(radii, &exps, quad.radial),
                _ => simplex_norms(domain, &exps, quad.radial),
            };
            Self::from_norms(n, max_degree, quad, exps, norms)
        } else {
            if quad.angular == 0 {
                return Err(Error::Input("quadrature needs angular nodes for this domain".into()));
            }
            let gram = full_gram(domain, &exps, quad);
            Self::from_gram(n, max_degree, quad, exps, &gram)
        }
    }

    fn from_norms(n: usize, max_degree: usize, quad: QuadratureSpec, exps: Vec<Vec<u16>>, norms: Vec<f64>) -> Result<Self> {
        let mut warnings = Vec::new();
        let mut keep_degree = max_degree;
        for (a, &c) in exps.iter().zip(&norms) {
            if !(c.is_finite() && c > 0.0) {
                let d = total(a);
                if d == 0 {
                    return Err(Error::Degenerate("volume integral is not positive".into()));
                }
                keep_degree = d - 1;
                warnings.push(format!("monomial norm underflow at degree {d}; truncated to degree {keep_degree}"));
                break;
            }
        }
        let (exps, norms): (Vec<_>, Vec<_>) =
            exps.into_iter().zip(norms).filter(|(a, _)| total(a) <= keep_degree).unzip();
        let inv_norms: Vec<f64> = norms.iter().map(|c| 1.0 / c.sqrt()).collect();
        let gram_defect = norms.iter().zip(&inv_norms).map(|(c, i)| (c * i * i - 1.0).abs()).fold(0.0, f64::max);
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(Self {
            dim: n,
            requested_degree: max_degree,
            degree: keep_degree,
            quadrature: quad,
            exponents: exps,
            basis: Basis::Diagonal { inv_norms },
            gram_defect,
            warnings,
        })
    }

    fn from_gram(
        n: usize,
        max_degree: usize,
        quad: QuadratureSpec,
        exps: Vec<Vec<u16>>,
        gram: &DMatrix<C64>,
    ) -> Result<Self> {
        let m = exps.len();
        let mut warnings = Vec::new();
        let mut keep_degree = max_degree;
        // <u, f> = u · (G conj(f)); the second factor is cached per basis function.
        let dual = |f: &[C64]| -> Vec<C64> {
            (0..m).map(|a| (0..m).map(|b| gram[(a, b)] * f[b].conj()).sum()).collect()
        };
        let dot = |u: &[C64], w: &[C64]| -> C64 { u.iter().zip(w).map(|(x, y)| x * y).sum() };
        let mut coeff: Vec<Vec<C64>> = Vec::with_capacity(m);
        let mut duals: Vec<Vec<C64>> = Vec::with_capacity(m);
        for k in 0..m {
            let d = total(&exps[k]);
            let mut q = vec![C64::new(0.0, 0.0); m];
            q[k] = C64::new(1.0, 0.0);
            // Two passes of modified Gram–Schmidt.
            for _ in 0..2 {
                for (f, w) in coeff.iter().zip(&duals) {
                    let proj = dot(&q, w);
                    for (qi, fi) in q.iter_mut().zip(f) {
                        *qi -= proj * fi;
                    }
                }
            }
            let nrm = dot(&q, &dual(&q)).re;
            let base = gram[(k, k)].re;
            if !(nrm.is_finite() && base > 0.0) || nrm / base < NORM_LOSS_CLIFF {
                if d == 0 {
                    return Err(Error::Degenerate("volume integral is not positive".into()));
                }
                keep_degree = d - 1;
                warnings.push(format!(
                    "Gram matrix ill-conditioned at degree {d} (relative norm {:.3e}); truncated to degree {keep_degree}",
                    (nrm / base).max(0.0)
                ));
                break;
            }
            let s = 1.0 / nrm.sqrt();
            let f: Vec<C64> = q.iter().map(|x| x * s).collect();
            duals.push(dual(&f));
            coeff.push(f);
        }
        let mut cnt = exps.iter().take_while(|a| total(a) <= keep_degree).count().min(coeff.len());

        // Orthonormality audit; a failure trims whole degrees.
        let defect = loop {
            let mut bad: Option<usize> = None;
            let mut defect: f64 = 0.0;
            for i in 0..cnt {
                for j in 0..=i {
                    let g = dot(&coeff[i], &duals[j]);
                    let e = (g - if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).norm();
                    defect = defect.max(e);
                    if e > GRAM_TOL && bad.is_none() {
                        bad = Some(i);
                    }
                }
            }
            let Some(i) = bad else { break defect };
            let d = total(&exps[i]);
            if d == 0 {
                return Err(Error::Degenerate("cannot orthonormalize the constant function".into()));
            }
            keep_degree = d - 1;
            warnings.push(format!(
                "orthonormality defect above {GRAM_TOL:e} at degree {d}; truncated to degree {keep_degree}"
            ));
            cnt = exps.iter().take_while(|a| total(a) <= keep_degree).count();
        };
        for w in &warnings {
            log::warn!("{w}");
        }
        let coeff = coeff[..cnt].iter().map(|f| f[..cnt].iter().map(|x| [x.re, x.im]).collect()).collect();
        Ok(Self {
            dim: n,
            requested_degree: max_degree,
            degree: keep_degree,
            quadrature: quad,
            exponents: exps.into_iter().take(cnt).collect(),
            basis: Basis::Full { coeff },
            gram_defect: defect,
            warnings,
        })
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Values `z0^k` for every coordinate and every power up to the degree.
    fn powers(&self, z0: &[C64]) -> Vec<Vec<C64>> {
        z0.iter()
            .map(|&x| {
                let mut p = Vec::with_capacity(self.degree + 1);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..=self.degree {
                    p.push(acc);
                    acc *= x;
                }
                p
            })
            .collect()
    }

    /// Taylor coefficients of each orthonormal function at `z0` for the multi-indices `taylor`.
    ///
    /// Row `i` holds the coefficients of `f_i`.
    pub(crate) fn taylor(&self, z0: &[C64], taylor: &[Vec<u8>]) -> Vec<Vec<C64>> {
        let pw = self.powers(z0);
        let mono: Vec<Vec<C64>> = self
            .exponents
            .iter()
            .map(|a| {
                taylor
                    .iter()
                    .map(|t| {
                        let mut v = C64::new(1.0, 0.0);
                        for j in 0..a.len() {
                            let (aj, tj) = (a[j] as usize, t[j] as usize);
                            if tj > aj {
                                return C64::new(0.0, 0.0);
                            }
                            v *= pw[j][aj - tj] * binom(aj, tj);
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        match &self.basis {
            Basis::Diagonal { inv_norms } => {
                mono.into_iter().zip(inv_norms).map(|(row, s)| row.into_iter().map(|x| x * s).collect()).collect()
            }
            Basis::Full { coeff } => coeff
                .iter()
                .map(|c| {
                    let mut row = vec![C64::new(0.0, 0.0); taylor.len()];
                    for (k, ck) in c.iter().enumerate() {
                        let ck = C64::new(ck[0], ck[1]);
                        if ck.norm_sqr() == 0.0 {
                            continue;
                        }
                        for (r, m) in row.iter_mut().zip(&mono[k]) {
                            *r += ck * m;
                        }
                    }
                    row
                })
                .collect(),
        }
    }

    /// `Σ |f_i(z)|²` with `z` in internal coordinates.
    pub fn diag(&self, z: &[C64]) -> f64 {
        let zero = vec![vec![0u8; self.dim]];
        self.taylor(z, &zero).iter().map(|r| r[0].norm_sqr()).sum()
    }

    /// Writes the kernel with a content hash; the domain must have a descriptor.
    pub fn save(&self, domain: &DomainSpec, path: &Path) -> Result<()> {
        let desc = domain
            .descriptor()
            .ok_or_else(|| Error::UnsupportedDomain("domain has no serializable descriptor".into()))?;
        let file = CacheFile {
            hash: cache_hash(&desc, self.requested_degree, &self.quadrature)?,
            domain: desc,
            kernel: self.clone(),
        };
        let text = serde_json::to_string(&file).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Reads a cached kernel, checking that it was built for `domain` at this degree and quadrature.
    pub fn load(domain: &DomainSpec, max_degree: usize, quad: QuadratureSpec, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: CacheFile = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        let desc = domain
            .descriptor()
            .ok_or_else(|| Error::UnsupportedDomain("domain has no serializable descriptor".into()))?;
        let expect = cache_hash(&desc, max_degree, &quad)?;
        if file.hash != expect || cache_hash(&file.domain, file.kernel.requested_degree, &file.kernel.quadrature)? != expect {
            return Err(Error::Config("kernel cache does not match domain, degree or quadrature".into()));
        }
        Ok(file.kernel)
    }

    /// Loads from `path` when a matching cache exists, otherwise builds and writes it.
    pub fn build_cached(domain: &DomainSpec, max_degree: usize, quad: QuadratureSpec, path: &Path) -> Result<Self> {
        if path.exists() {
            if let Ok(k) = Self::load(domain, max_degree, quad, path) {
                return Ok(k);
            }
        }
        let k = Self::build(domain, max_degree, quad)?;
        k.save(domain, path)?;
        Ok(k)
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

pub fn cache_hash(desc: &DomainDescriptor, degree: usize, quad: &QuadratureSpec) -> Result<String> {
    let mut key = BTreeMap::new();
    key.insert("domain", serde_json::to_value(desc).map_err(|e| Error::Io(e.to_string()))?);
    key.insert("degree", serde_json::Value::from(degree));
    key.insert("quadrature", serde_json::to_value(quad).map_err(|e| Error::Io(e.to_string()))?);
    let bytes = serde_json::to_vec(&key).map_err(|e| Error::Io(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// `‖z^α‖² = Π_j π r_j^{2α_j+2} / (α_j+1)`, integrated radially per coordinate.
fn polydisk_norms(radii: &[f64], exps: &[Vec<u16>], m: usize) -> Vec<f64> {
    let g = gauss_legendre_unit(m);
    let maxd = exps.iter().flat_map(|a| a.iter()).copied().max().unwrap_or(0) as usize;
    // table[j][k] = π ∫_0^{r_j²} x^k dx
    let table: Vec<Vec<f64>> = radii
        .iter()
        .map(|r| {
            let r2 = r * r;
            (0..=maxd).map(|k| PI * r2 * g.iter().map(|(u, w)| w * (r2 * u).powi(k as i32)).sum::<f64>()).collect()
        })
        .collect();
    exps.iter().map(|a| a.iter().enumerate().map(|(j, &k)| table[j][k as usize]).product()).collect()
}

/// Reinhardt domains: with `x_j = |z_j|²` and `x = t y`, `y` on the simplex,
/// `‖z^α‖² = 2πⁿ ∫_Δ y^α ρ(y)^{2|α|+2n} / (2|α|+2n)` where `ρ(y) = 1 / gauge(√y)`.
fn simplex_norms(domain: &DomainSpec, exps: &[Vec<u16>], m: usize) -> Vec<f64> {
    let n = domain.dim();
    let maxd = exps.last().map_or(0, |a| total(a));
    let rule = simplex_rule(n, m);
    let nodes: Vec<(Vec<Vec<f64>>, Vec<f64>, f64)> = rule
        .par_iter()
        .map(|(y, w)| {
            let root: Vec<C64> = y.iter().map(|&x| C64::new(x.sqrt(), 0.0)).collect();
            let rho = 1.0 / domain.gauge(&root);
            let ypow: Vec<Vec<f64>> = y.iter().map(|&x| (0..=maxd).map(|k| x.powi(k as i32)).collect()).collect();
            let rpow: Vec<f64> = (0..=maxd).map(|k| rho.powi((2 * k + 2 * n) as i32)).collect();
            (ypow, rpow, *w)
        })
        .collect();
    exps.par_iter()
        .map(|a| {
            let d = total(a);
            let s: f64 = nodes
                .iter()
                .map(|(yp, rp, w)| w * rp[d] * a.iter().enumerate().map(|(j, &k)| yp[j][k as usize]).product::<f64>())
                .sum();
            2.0 * PI.powi(n as i32) * s / (2 * d + 2 * n) as f64
        })
        .collect()
}

/// Full Gram matrix `G[a][b] = ∫ z^a conj(z^b)` over a star-shaped domain, in polar form
/// `z_j = √(t y_j) e^{iθ_j}`; the radial integral in `t` is done analytically.
fn full_gram(domain: &DomainSpec, exps: &[Vec<u16>], quad: QuadratureSpec) -> DMatrix<C64> {
    let n = domain.dim();
    let simplex = simplex_rule(n, quad.radial);
    let angles = torus_angles(n, quad.angular);
    let maxd = exps.last().map_or(0, |a| total(a));
    let scale = 2.0 * PI.powi(n as i32) / (quad.angular as f64).powi(n as i32);
    let nodes: Vec<(&Vec<f64>, f64, &Vec<f64>)> =
        simplex.iter().flat_map(|(y, w)| angles.iter().map(move |th| (y, *w, th))).collect();
    let m = exps.len();
    // Row k: sqrt(w ρ^{2n}) ρ^{|a|} u^a with u_j = √y_j e^{iθ_j}.
    let rows: Vec<Vec<C64>> = nodes
        .par_iter()
        .map(|(y, w, th)| {
            let u: Vec<C64> = y.iter().zip(th.iter()).map(|(&x, &t)| C64::from_polar(x.sqrt(), t)).collect();
            let rho = 1.0 / domain.gauge(&u);
            let pw: Vec<Vec<C64>> = u.iter().map(|&x| (0..=maxd).map(|k| x.powu(k as u32)).collect()).collect();
            let base = (w * rho.powi(2 * n as i32)).sqrt();
            exps.iter()
                .map(|a| {
                    let mut v = C64::new(base * rho.powi(total(a) as i32), 0.0);
                    for (j, &k) in a.iter().enumerate() {
                        v *= pw[j][k as usize];
                    }
                    v
                })
                .collect()
        })
        .collect();
    let psi = DMatrix::from_fn(rows.len(), m, |k, a| rows[k][a]);
    let raw = psi.transpose() * psi.map(|x| x.conj());
    DMatrix::from_fn(m, m, |a, b| {
        raw[(a, b)] * (scale / (total(&exps[a]) + total(&exps[b]) + 2 * n) as f64)
    })
}

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::MetricJet;
use crate::error::{Error, Result};
use crate::point::C64;

/// Chern curvature components `R_{i j̄ k l̄}` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    r: Vec<C64>,
}

impl CurvatureTensor {
    pub fn zeros(n: usize) -> Self {
        Self { n, r: vec![C64::new(0.0, 0.0); n.pow(4)] }
    }

    /// `R_{i j̄ k l̄} = -∂_k ∂̄_l h_{i j̄} + h^{q̄ p} (∂_k h_{i q̄}) (∂̄_l h_{p j̄})`.
    pub fn from_jet(jet: &MetricJet) -> Result<Self> {
        let n = jet.dim();
        let inv = jet
            .h
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("singular metric matrix".into()))?;
        if inv.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::Degenerate("non-finite inverse metric".into()));
        }
        let mut t = Self::zeros(n);
        for k in 0..n {
            for l in 0..n {
                // (∂_k H) inv (∂̄_l H): entry (i, j) = sum_{q,p} ∂_k h_{i q̄} inv[q][p] ∂̄_l h_{p j̄}
                let prod: DMatrix<C64> = &jet.dh[k] * &inv * &jet.dhb[l];
                for i in 0..n {
                    for j in 0..n {
                        let idx = t.index(i, j, k, l);
                        t.r[idx] = -jet.ddh[k][l][(i, j)] + prod[(i, j)];
                    }
                }
            }
        }
        Ok(t)
    }

    /// Builds from a flat list in the [`CurvatureTensor::index`] order.
    pub fn from_components(n: usize, r: Vec<C64>) -> Result<Self> {
        if r.len() != n.pow(4) {
            return Err(Error::Input(format!("expected {} components, got {}", n.pow(4), r.len())));
        }
        Ok(Self { n, r })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[C64] {
        &self.r
    }

    pub fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.r[self.index(i, j, k, l)]
    }

    /// `R(X, Ȳ, Z, W̄) = sum R_{i j̄ k l̄} X^i conj(Y^j) Z^k conj(W^l)`.
    pub fn eval(&self, x: &[C64], y: &[C64], z: &[C64], w: &[C64]) -> C64 {
        let n = self.n;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let a = x[i] * y[j].conj();
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        acc += self.r[self.index(i, j, k, l)] * a * z[k] * w[l].conj();
                    }
                }
            }
        }
        acc
    }

    /// `R(X, X̄, X, X̄)`.
    pub fn holomorphic(&self, x: &[C64]) -> f64 {
        self.eval(x, x, x, x).re
    }

    /// Largest violation of the Hermitian and Kähler symmetries, relative to the largest component.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let scale = self.r.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r - self.get(j, i, l, k).conj()).norm())
                            .max((r - self.get(k, j, i, l)).norm())
                            .max((r - self.get(i, l, k, j)).norm());
                    }
                }
            }
        }
        worst / scale
    }

    /// Ricci form `Ric_{k l̄} = h^{j̄ i} R_{i j̄ k l̄}`.
    pub fn ricci(&self, h: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let n = self.n;
        let inv = h.clone().try_inverse().ok_or_else(|| Error::Degenerate("singular metric".into()))?;
        let mut ric = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for k in 0..n {
            for l in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        acc += inv[(j, i)] * self.get(i, j, k, l);
                    }
                }
                ric[(k, l)] = acc;
            }
        }
        Ok(ric)
    }

    /// Random tensor with all Kähler symmetries (average over the symmetry group).
    pub fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut raw = Self::zeros(n);
        for c in raw.r.iter_mut() {
            *c = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = C64::new(0.0, 0.0);
                        for (a, b, c, d) in [(i, j, k, l), (k, j, i, l), (i, l, k, j), (k, l, i, j)] {
                            acc += raw.get(a, b, c, d);
                            acc += raw.get(b, a, d, c).conj();
                        }
                        let idx = t.index(i, j, k, l);
                        t.r[idx] = acc / 8.0;
                    }
                }
            }
        }
        t
    }

    /// Perturbs a single component, breaking the symmetries (negative control).
    pub fn with_broken_symmetry(&self, amount: f64) -> Self {
        let mut t = self.clone();
        let a = t.index(0, 0, 0, 0);
        t.r[a] += C64::new(0.0, amount);
        if self.n > 1 {
            let b = t.index(0, 0, 0, 1);
            t.r[b] += C64::new(amount, 0.0);
        }
        t
    }

    pub fn dump(&self, point: &[C64]) -> TensorDump {
        TensorDump {
            dimension: self.n,
            point: point.iter().map(|c| [c.re, c.im]).collect(),
            index_order: "component[((i*n + j)*n + k)*n + l] = R_{i jbar k lbar}".into(),
            components: self.r.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

/// Serialized tensor: point and flattened components as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorDump {
    pub dimension: usize,
    pub point: Vec<[f64; 2]>,
    pub index_order: String,
    pub components: Vec<[f64; 2]>,
}

impl TensorDump {
    pub fn tensor(&self) -> Result<CurvatureTensor> {
        CurvatureTensor::from_components(
            self.dimension,
            self.components.iter().map(|p| C64::new(p[0], p[1])).collect(),
        )
    }
}

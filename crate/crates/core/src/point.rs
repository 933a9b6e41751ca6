//! Points and tangent vectors in C^n.

use std::ops::{Add, Index, Mul, Sub};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermitian inner product `<a, b> = sum a_i conj(b_i)`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

macro_rules! cvector_type {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name {
            pub coords: Vec<C64>,
        }

        impl $name {
            pub fn new(coords: Vec<C64>) -> Self {
                Self { coords }
            }

            pub fn try_new(coords: Vec<C64>) -> Result<Self> {
                if coords.is_empty() {
                    return Err(Error::Input("empty coordinate vector".into()));
                }
                if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(Error::Input("non-finite coordinate".into()));
                }
                Ok(Self { coords })
            }

            pub fn from_real(re: &[f64]) -> Self {
                Self::new(re.iter().map(|&x| C64::new(x, 0.0)).collect())
            }

            /// Builds from interleaved `(re, im)` pairs of a point in R^{2n}.
            pub fn from_real_pairs(x: &[f64]) -> Self {
                Self::new(x.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
            }

            pub fn to_real_pairs(&self) -> Vec<f64> {
                self.coords.iter().flat_map(|c| [c.re, c.im]).collect()
            }

            pub fn zeros(n: usize) -> Self {
                Self::new(vec![C64::new(0.0, 0.0); n])
            }

            pub fn basis(n: usize, i: usize) -> Self {
                let mut v = Self::zeros(n);
                v.coords[i] = C64::new(1.0, 0.0);
                v
            }

            pub fn dim(&self) -> usize {
                self.coords.len()
            }

            pub fn norm_sqr(&self) -> f64 {
                norm_sqr(&self.coords)
            }

            pub fn norm(&self) -> f64 {
                self.norm_sqr().sqrt()
            }

            pub fn is_zero(&self) -> bool {
                self.coords.iter().all(|c| c.re == 0.0 && c.im == 0.0)
            }

            pub fn scale(&self, s: C64) -> Self {
                Self::new(self.coords.iter().map(|c| c * s).collect())
            }

            pub fn scale_re(&self, s: f64) -> Self {
                Self::new(self.coords.iter().map(|c| c * s).collect())
            }

            pub fn as_slice(&self) -> &[C64] {
                &self.coords
            }

            pub fn to_dvector(&self) -> DVector<C64> {
                DVector::from_column_slice(&self.coords)
            }

            pub fn from_dvector(v: &DVector<C64>) -> Self {
                Self::new(v.iter().copied().collect())
            }

            pub fn conj(&self) -> Self {
                Self::new(self.coords.iter().map(|c| c.conj()).collect())
            }
        }

        impl Index<usize> for $name {
            type Output = C64;
            fn index(&self, i: usize) -> &C64 {
                &self.coords[i]
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: Self) -> $name {
                $name::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect())
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: Self) -> $name {
                $name::new(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect())
            }
        }

        impl Mul<f64> for &$name {
            type Output = $name;
            fn mul(self, s: f64) -> $name {
                self.scale_re(s)
            }
        }
    };
}

cvector_type!(CPoint);
cvector_type!(CTangent);

impl CPoint {
    /// `z + zeta * v`.
    pub fn displaced(&self, v: &CTangent, zeta: C64) -> CPoint {
        CPoint::new(
            self.coords
                .iter()
                .zip(&v.coords)
                .map(|(a, b)| a + zeta * b)
                .collect(),
        )
    }

    pub fn as_tangent(&self) -> CTangent {
        CTangent::new(self.coords.clone())
    }
}

impl CTangent {
    pub fn as_point(&self) -> CPoint {
        CPoint::new(self.coords.clone())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected != got {
        return Err(Error::Input(format!(
            "{what}: dimension mismatch (expected {expected}, got {got})"
        )));
    }
    Ok(())
}

pub(crate) fn check_nonzero(v: &CTangent) -> Result<()> {
    if v.is_zero() {
        return Err(Error::SlitBundle("tangent vector must be nonzero".into()));
    }
    Ok(())
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

//! Truncated Taylor jets in `z` and `z̄` for exact Wirtinger derivatives.
//!
//! A jet stores the coefficients of `(z - z0)^A (z̄ - z̄0)^B` for `|A| <= p`,
//! `|B| <= q`. Products and smooth compositions are exact up to that order,
//! so `∂^A ∂̄^B f(z0) = A! B! c[A, B]` with no truncation error.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::point::C64;

#[derive(Debug)]
struct Side {
    indices: Vec<Vec<u8>>,
    lookup: HashMap<Vec<u8>, usize>,
    /// `add[i][j]` = index of `indices[i] + indices[j]` when within the order.
    add: Vec<Vec<Option<usize>>>,
    factorial: Vec<f64>,
}

impl Side {
    fn new(n: usize, order: usize) -> Self {
        let mut indices: Vec<Vec<u8>> = vec![vec![0; n]];
        let mut frontier = indices.clone();
        for _ in 0..order {
            let mut next = Vec::new();
            for a in &frontier {
                // Extend only at or after the last nonzero slot to avoid duplicates.
                let start = a.iter().rposition(|&x| x > 0).unwrap_or(0);
                for k in start..n {
                    let mut b = a.clone();
                    b[k] += 1;
                    next.push(b);
                }
            }
            indices.extend(next.iter().cloned());
            frontier = next;
        }
        let lookup: HashMap<Vec<u8>, usize> =
            indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let add = indices
            .iter()
            .map(|a| {
                indices
                    .iter()
                    .map(|b| {
                        let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        lookup.get(&s).copied()
                    })
                    .collect()
            })
            .collect();
        let factorial = indices
            .iter()
            .map(|a| a.iter().map(|&k| (1..=k as u32).product::<u32>() as f64).product())
            .collect();
        Self { indices, lookup, add, factorial }
    }

    fn len(&self) -> usize {
        self.indices.len()
    }
}

/// Shared index bookkeeping for jets in `n` variables with orders `(p, q)`.
#[derive(Debug)]
pub struct JetSpace {
    n: usize,
    holo: Side,
    anti: Side,
}

impl JetSpace {
    pub fn new(n: usize, p: usize, q: usize) -> Arc<Self> {
        Arc::new(Self { n, holo: Side::new(n, p), anti: Side::new(n, q) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.holo.len() * self.anti.len()
    }

    fn unit(&self, k: usize) -> Vec<u8> {
        let mut e = vec![0u8; self.n];
        e[k] = 1;
        e
    }
}

#[derive(Debug, Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    c: Vec<C64>,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, value: C64) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); space.width()];
        c[0] = value;
        Self { space: space.clone(), c }
    }

    pub fn real(space: &Arc<JetSpace>, value: f64) -> Self {
        Self::constant(space, C64::new(value, 0.0))
    }

    /// The coordinate function `z_k` expanded at `z0`.
    pub fn var(space: &Arc<JetSpace>, z0: &[C64], k: usize) -> Self {
        let mut j = Self::constant(space, z0[k]);
        if let Some(&i) = space.holo.lookup.get(&space.unit(k)) {
            j.c[i * space.anti.len()] = C64::new(1.0, 0.0);
        }
        j
    }

    /// The function `z̄_k` expanded at `z0`.
    pub fn conj_var(space: &Arc<JetSpace>, z0: &[C64], k: usize) -> Self {
        let mut j = Self::constant(space, z0[k].conj());
        if let Some(&i) = space.anti.lookup.get(&space.unit(k)) {
            j.c[i] = C64::new(1.0, 0.0);
        }
        j
    }

    /// Holomorphic jet from Taylor coefficients keyed by multi-index.
    pub fn from_holomorphic(space: &Arc<JetSpace>, coeff: impl Fn(&[u8]) -> C64) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); space.width()];
        for (i, a) in space.holo.indices.iter().enumerate() {
            c[i * space.anti.len()] = coeff(a);
        }
        Self { space: space.clone(), c }
    }

    /// Jet with coefficient `coeff(A, B)` on `(z - z0)^A (z̄ - z̄0)^B`.
    pub fn from_fn(space: &Arc<JetSpace>, coeff: impl Fn(&[u8], &[u8]) -> C64) -> Self {
        let nb = space.anti.len();
        let mut c = vec![C64::new(0.0, 0.0); space.width()];
        for (ia, a) in space.holo.indices.iter().enumerate() {
            for (ib, b) in space.anti.indices.iter().enumerate() {
                c[ia * nb + ib] = coeff(a, b);
            }
        }
        Self { space: space.clone(), c }
    }

    /// Multi-indices of the holomorphic side, in storage order.
    pub fn holo_indices(space: &Arc<JetSpace>) -> &[Vec<u8>] {
        &space.holo.indices
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    /// Complex conjugate function: swaps the roles of `z` and `z̄`.
    /// Requires a space with equal orders.
    pub fn conj(&self) -> Self {
        let s = &self.space;
        assert_eq!(s.holo.len(), s.anti.len(), "conjugation needs symmetric orders");
        let nb = s.anti.len();
        let mut c = vec![C64::new(0.0, 0.0); s.width()];
        for ia in 0..s.holo.len() {
            for ib in 0..nb {
                let a = &s.holo.indices[ia];
                let b = &s.anti.indices[ib];
                let ja = s.holo.lookup[b];
                let jb = s.anti.lookup[a];
                c[ja * nb + jb] = self.c[ia * nb + ib].conj();
            }
        }
        Self { space: s.clone(), c }
    }

    /// `∂^A ∂̄^B f(z0)`.
    pub fn derivative(&self, a: &[u8], b: &[u8]) -> C64 {
        let s = &self.space;
        let (Some(&ia), Some(&ib)) = (s.holo.lookup.get(a), s.anti.lookup.get(b)) else {
            panic!("derivative order exceeds the jet truncation");
        };
        self.c[ia * s.anti.len() + ib] * (s.holo.factorial[ia] * s.anti.factorial[ib])
    }

    /// Derivative given as lists of variable indices: `d(&[i, k], &[j])` is `∂_i ∂_k ∂̄_j`.
    pub fn d(&self, holo: &[usize], anti: &[usize]) -> C64 {
        let n = self.space.n;
        let mut a = vec![0u8; n];
        let mut b = vec![0u8; n];
        for &i in holo {
            a[i] += 1;
        }
        for &j in anti {
            b[j] += 1;
        }
        self.derivative(&a, &b)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { space: self.space.clone(), c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn add_const(&self, s: C64) -> Self {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    /// Composition `f(self)` given `f^{(m)}(x0)` for `m = 0..=p+q`.
    pub fn compose(&self, derivs: &[C64]) -> Self {
        let order = self.space.holo.indices.last().map_or(0, |a| a.iter().map(|&x| x as usize).sum::<usize>())
            + self.space.anti.indices.last().map_or(0, |a| a.iter().map(|&x| x as usize).sum::<usize>());
        assert!(derivs.len() > order, "not enough derivatives for composition");
        let mut delta = self.clone();
        delta.c[0] = C64::new(0.0, 0.0);
        let mut out = Jet::constant(&self.space, derivs[0]);
        let mut power = Jet::real(&self.space, 1.0);
        let mut fact = 1.0;
        for (m, dm) in derivs.iter().enumerate().take(order + 1).skip(1) {
            power = &power * &delta;
            fact *= m as f64;
            out = &out + &power.scale(dm / fact);
        }
        out
    }

    pub fn ln(&self) -> Self {
        let x = self.value();
        let mut d = vec![x.ln()];
        let mut coef = C64::new(1.0, 0.0);
        let mut pw = x;
        for m in 1..=8 {
            d.push(coef / pw);
            coef *= -(m as f64);
            pw *= x;
        }
        self.compose(&d)
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&vec![e; 9])
    }

    pub fn powf(&self, p: f64) -> Self {
        let x = self.value();
        let mut d = Vec::with_capacity(9);
        let mut coef = 1.0;
        for m in 0..9 {
            d.push(x.powf(p - m as f64) * coef);
            coef *= p - m as f64;
        }
        self.compose(&d)
    }

    pub fn recip(&self) -> Self {
        self.powf(-1.0)
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet { space: self.space.clone(), c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet { space: self.space.clone(), c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let s = &self.space;
        let nb = s.anti.len();
        let mut c = vec![C64::new(0.0, 0.0); s.width()];
        let zero = C64::new(0.0, 0.0);
        for (i, x) in self.c.iter().enumerate() {
            if *x == zero {
                continue;
            }
            let (ia, ib) = (i / nb, i % nb);
            for (j, y) in rhs.c.iter().enumerate() {
                if *y == zero {
                    continue;
                }
                let (ja, jb) = (j / nb, j % nb);
                if let (Some(ka), Some(kb)) = (s.holo.add[ia][ja], s.anti.add[ib][jb]) {
                    c[ka * nb + kb] += x * y;
                }
            }
        }
        Jet { space: s.clone(), c }
    }
}

/// Jets of `z_k` and `z̄_k` at `z0` in a common space.
pub fn coordinates(space: &Arc<JetSpace>, z0: &[C64]) -> (Vec<Jet>, Vec<Jet>) {
    let z = (0..z0.len()).map(|k| Jet::var(space, z0, k)).collect();
    let zb = (0..z0.len()).map(|k| Jet::conj_var(space, z0, k)).collect();
    (z, zb)
}

/// Jet of `sum_k z_k z̄_k`.
pub fn norm_sqr_jet(z: &[Jet], zb: &[Jet]) -> Jet {
    let mut acc = Jet::real(z[0].space(), 0.0);
    for (a, b) in z.iter().zip(zb) {
        acc = &acc + &(a * b);
    }
    acc
}

//! Exact evaluation of the four operators on trigonometric polynomials, by
//! convolution of Fourier coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::Result;
use crate::geometry::{Field, Grid};

/// Trigonometric polynomial `Σ c_k e^{ikθ}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigPoly(pub BTreeMap<i64, Complex64>);

impl TrigPoly {
    pub fn from_terms(terms: &[(i64, Complex64)]) -> Self {
        let mut p = Self::default();
        for (k, c) in terms {
            *p.0.entry(*k).or_default() += c;
        }
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms(&[(0, Complex64::new(c, 0.0))])
    }

    pub fn cos(k: i64) -> Self {
        Self::from_terms(&[(k, Complex64::new(0.5, 0.0)), (-k, Complex64::new(0.5, 0.0))])
    }

    pub fn sin(k: i64) -> Self {
        Self::from_terms(&[(k, Complex64::new(0.0, -0.5)), (-k, Complex64::new(0.0, 0.5))])
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::default();
        for (ka, ca) in &self.0 {
            for (kb, cb) in &other.0 {
                *p.0.entry(ka + kb).or_default() += ca * cb;
            }
        }
        p
    }

    /// `self + s · other`.
    pub fn add(&self, other: &Self, s: f64) -> Self {
        let mut p = self.clone();
        for (k, c) in &other.0 {
            *p.0.entry(*k).or_default() += c * s;
        }
        p
    }

    fn apply(&self, m: impl Fn(i64) -> Complex64) -> Self {
        Self(self.0.iter().map(|(k, c)| (*k, c * m(*k))).collect())
    }

    /// `(-Δ)^{1/4}`.
    pub fn quarter(&self) -> Self {
        self.apply(|k| Complex64::new((k.abs() as f64).sqrt(), 0.0))
    }

    pub fn riesz(&self) -> Self {
        self.apply(|k| Complex64::new(0.0, -(k.signum() as f64)))
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.0.iter().map(|(k, c)| (c * Complex64::from_polar(1.0, *k as f64 * theta)).re).sum()
    }

    pub fn sample(&self, grid: Grid) -> Result<Field> {
        Field::from_fn(grid, |t| self.eval(t))
    }

    pub fn max_mode(&self) -> i64 {
        self.0.keys().map(|k| k.abs()).max().unwrap_or(0)
    }
}

pub fn t(q: &TrigPoly, v: &TrigPoly) -> TrigPoly {
    let a = q.mul(v).quarter();
    let b = q.mul(&v.quarter());
    let c = q.quarter().mul(v);
    a.add(&b, -1.0).add(&c, 1.0)
}

pub fn s(q: &TrigPoly, v: &TrigPoly) -> TrigPoly {
    let a = q.mul(v).quarter();
    let b = q.mul(&v.quarter().riesz()).riesz();
    let c = q.quarter().mul(&v.riesz()).riesz();
    a.add(&b, -1.0).add(&c, 1.0)
}

pub fn f(q: &TrigPoly, v: &TrigPoly) -> TrigPoly {
    q.riesz().mul(&v.riesz()).add(&q.mul(v), -1.0)
}

pub fn lambda(q: &TrigPoly, v: &TrigPoly) -> TrigPoly {
    q.mul(v).add(&q.mul(&v.riesz()).riesz(), 1.0)
}

//! Gaussian-weighted Pohozaev identity in the plane,
//! `∬ e^{-|x-x₀|²/4t} |x-x₀|² |∂_ν u|² = ∬ e^{-|x-x₀|²/4t} |∂_θ u|²`.

use serde::{Deserialize, Serialize};

use super::PohozaevReport;
use crate::error::{invalid, Error, Result};

/// `m`-component field on the uniform square grid `x_i = -a + i h`,
/// `h = 2a / (n - 1)`; samples are stored as `[(i * n + j) * m + c]` with `i`
/// indexing `x₁` and `j` indexing `x₂`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneField {
    half_width: f64,
    n: usize,
    m: usize,
    samples: Vec<f64>,
}

impl PlaneField {
    pub fn new(half_width: f64, n: usize, m: usize, samples: Vec<f64>) -> Result<Self> {
        if !(half_width > 0.0) || n < 5 || m == 0 {
            return Err(Error::InvalidGrid(format!(
                "plane grid needs a > 0, n >= 5, m >= 1 (a = {half_width}, n = {n}, m = {m})"
            )));
        }
        if samples.len() != n * n * m {
            return Err(Error::ShapeMismatch(format!("expected {} samples, got {}", n * n * m, samples.len())));
        }
        Ok(Self { half_width, n, m, samples })
    }

    pub fn from_fn<F: Fn(f64, f64) -> Vec<f64>>(half_width: f64, n: usize, m: usize, f: F) -> Result<Self> {
        let h = 2.0 * half_width / (n - 1) as f64;
        let mut samples = Vec::with_capacity(n * n * m);
        for i in 0..n {
            for j in 0..n {
                let v = f(-half_width + i as f64 * h, -half_width + j as f64 * h);
                if v.len() != m {
                    return Err(Error::ShapeMismatch(format!("closure returned {} components, expected {m}", v.len())));
                }
                samples.extend(v);
            }
        }
        Self::new(half_width, n, m, samples)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> usize {
        self.m
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn value(&self, i: usize, j: usize, c: usize) -> f64 {
        self.samples[(i * self.n + j) * self.m + c]
    }
}

/// Evaluates both sides per `t` over interior nodes with central differences.
/// The boundary ring is excluded. The Gaussian must be negligible at the
/// boundary: `a ≥ 6 √t` measured from `x₀`, i.e. a boundary weight of at most `e^{-9}`.
/// The hypothesis residual is `max_i max_x |⟨∂_i u, Δu⟩|`.
pub fn residual_plane(u: &PlaneField, x0: (f64, f64), t_values: &[f64]) -> Result<PohozaevReport> {
    super::check_t(t_values)?;
    let a = u.half_width;
    let reach = a - x0.0.abs().max(x0.1.abs());
    for &t in t_values {
        if reach < 6.0 * t.sqrt() {
            return invalid(format!(
                "t = {t} is too large for the grid: need a - |x0| >= 6 sqrt(t) = {:.3}, have {reach:.3}",
                6.0 * t.sqrt()
            ));
        }
    }
    let n = u.n;
    let m = u.m;
    let h = u.spacing();
    let mut radial = vec![0.0; (n - 2) * (n - 2)];
    let mut angular = vec![0.0; (n - 2) * (n - 2)];
    let mut r2 = vec![0.0; (n - 2) * (n - 2)];
    let mut hyp = 0.0f64;
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let (y1, y2) = (u.coord(i) - x0.0, u.coord(j) - x0.1);
            let k = (i - 1) * (n - 2) + (j - 1);
            r2[k] = y1 * y1 + y2 * y2;
            let (mut rad, mut ang, mut h1, mut h2) = (0.0, 0.0, 0.0, 0.0);
            for c in 0..m {
                let d1 = (u.value(i + 1, j, c) - u.value(i - 1, j, c)) / (2.0 * h);
                let d2 = (u.value(i, j + 1, c) - u.value(i, j - 1, c)) / (2.0 * h);
                let lap = (u.value(i + 1, j, c) + u.value(i - 1, j, c) + u.value(i, j + 1, c) + u.value(i, j - 1, c)
                    - 4.0 * u.value(i, j, c))
                    / (h * h);
                // |x|² |∂_ν u|² = (x · ∇u)², ∂_θ u = x₁ ∂₂u - x₂ ∂₁u
                rad += (y1 * d1 + y2 * d2).powi(2);
                ang += (y1 * d2 - y2 * d1).powi(2);
                h1 += d1 * lap;
                h2 += d2 * lap;
            }
            radial[k] = rad;
            angular[k] = ang;
            hyp = hyp.max(h1.abs()).max(h2.abs());
        }
    }
    let mut report = PohozaevReport::default();
    for &t in t_values {
        let (mut l, mut r) = (0.0, 0.0);
        for k in 0..r2.len() {
            let w = (-r2[k] / (4.0 * t)).exp() * h * h;
            l += w * radial[k];
            r += w * angular[k];
        }
        report.push_scalar(t, l, r);
    }
    report.hypothesis_residual = hyp;
    Ok(report)
}

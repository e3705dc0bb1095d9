//! The operators `M±[w](t) = ∫ K±(x) w(tx) dx` with
//! `K⁺(x) = √π cos(arctan(-x)) (1+x²)^{-3/4}` and
//! `K⁻(x) = √π sin(arctan(-x)) (1+x²)^{-3/4}`, and the checks around them.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::inverse_quarter_laplacian;
use crate::geometry::{even_part, Field, Grid, Interpolation, LineGrid, TailModel};
use crate::quadrature::{integrate_to_infinity, integrate_with_breaks, QuadOptions};

/// `√π (1+x²)^{-5/4}`.
pub fn m_plus_kernel(x: f64) -> f64 {
    PI.sqrt() * (1.0 + x * x).powf(-1.25)
}

/// `-√π x (1+x²)^{-5/4}`.
pub fn m_minus_kernel(x: f64) -> f64 {
    -PI.sqrt() * x * (1.0 + x * x).powf(-1.25)
}

/// `(-Δ)^{-1/4}[(x²-1)/(1+x²)²] = -(√π/2) Re (1+ix)^{-3/2}`.
pub fn quarter_inverse_plus_exact(x: f64) -> f64 {
    -0.5 * PI.sqrt() * Complex64::new(1.0, x).powf(-1.5).re
}

/// `(-Δ)^{-1/4}[2x/(1+x²)²] = -(√π/2) Im (1+ix)^{-3/2}`.
pub fn quarter_inverse_minus_exact(x: f64) -> f64 {
    -0.5 * PI.sqrt() * Complex64::new(1.0, x).powf(-1.5).im
}

/// `∫ K(x) w(tx) dx` for a closure `w`, by adaptive quadrature.
fn m_of<K: Fn(f64) -> f64, W: Fn(f64) -> f64>(kernel: K, w: W, t: f64) -> f64 {
    if t == 0.0 {
        return w(0.0) * integrate_to_infinity(|x| kernel(x) + kernel(-x), 0.0, 1.0, QuadOptions::default()).value;
    }
    let f = |x: f64| kernel(x) * w(t * x) + kernel(-x) * w(-t * x);
    let scale = 1.0f64.max(1.0 / t.abs());
    let edge = 64.0 * scale;
    let mut breaks = Vec::new();
    let mut b = 1e-3 * scale.min(1.0);
    while b < edge {
        breaks.push(b);
        b *= 2.0;
    }
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 };
    integrate_with_breaks(f, 0.0, edge, &breaks, opts).value + integrate_to_infinity(f, edge, edge, opts).value
}

pub fn m_plus_of<W: Fn(f64) -> f64>(w: W, t: f64) -> f64 {
    m_of(m_plus_kernel, w, t)
}

pub fn m_minus_of<W: Fn(f64) -> f64>(w: W, t: f64) -> f64 {
    m_of(m_minus_kernel, w, t)
}

fn m_apply(w: &Field, t_grid: &LineGrid, kernel: fn(f64) -> f64) -> Result<Field> {
    let line = *w.grid().as_line()?;
    let tails = w.tails().ok_or_else(|| Error::MissingTailModel("M± needs the far field of w".into()))?.to_vec();
    let h = line.spacing();
    let half = line.half_width();
    let nodes = line.nodes();
    let opts = QuadOptions { abs_tol: 1e-16, rel_tol: 1e-12, max_intervals: 2000 };
    let columns: Vec<Vec<f64>> = (0..w.components())
        .map(|c| {
            let col = w.component(c);
            let tail = tails[c];
            t_grid
                .nodes()
                .par_iter()
                .map(|&t| {
                    if t.abs() < 4.0 * h {
                        return m_of(kernel, |y| w.eval(c, y, Interpolation::Lagrange).unwrap_or(0.0), t);
                    }
                    let at = t.abs();
                    let inner: f64 = nodes.iter().zip(&col).map(|(&y, v)| kernel(y / t) * v).sum::<f64>() * h;
                    let right = integrate_to_infinity(|y| kernel(y / t) * tail.eval(y), half, at.max(half), opts).value;
                    let left =
                        integrate_to_infinity(|y| kernel(-y / t) * tail.eval(-y), half, at.max(half), opts).value;
                    (inner + right + left) / at
                })
                .collect()
        })
        .collect();
    Field::from_components(Grid::Line(*t_grid), &columns)
}

/// `M⁺[w]` sampled on `t_grid`. `w` must carry a tail model.
pub fn m_plus(w: &Field, t_grid: &LineGrid) -> Result<Field> {
    m_apply(w, t_grid, m_plus_kernel)
}

/// `M⁻[w]` sampled on `t_grid`. `w` must carry a tail model.
pub fn m_minus(w: &Field, t_grid: &LineGrid) -> Result<Field> {
    m_apply(w, t_grid, m_minus_kernel)
}

/// Max errors of the spectral `(-Δ)^{-1/4}` of the two Pohozaev kernels on
/// `|x| ≤ window`, against the `K±` forms and against the exact forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelTransformReport {
    pub window: f64,
    pub plus_vs_kernel: f64,
    pub minus_vs_kernel: f64,
    pub plus_vs_exact: f64,
    pub minus_vs_exact: f64,
}

pub fn kernel_transform_check(grid: &LineGrid, window: f64) -> Result<KernelTransformReport> {
    let g = Grid::Line(*grid);
    let fp = Field::from_fn(g, |x| (x * x - 1.0) / (1.0 + x * x).powi(2))?;
    let fm = Field::from_fn(g, |x| 2.0 * x / (1.0 + x * x).powi(2))?;
    let ip = inverse_quarter_laplacian(&fp)?;
    let im = inverse_quarter_laplacian(&fm)?;
    let err = |f: &Field, exact: fn(f64) -> f64| {
        grid.nodes()
            .iter()
            .enumerate()
            .filter(|(_, x)| x.abs() <= window)
            .map(|(j, &x)| (f.value(j, 0) - exact(x)).abs())
            .fold(0.0, f64::max)
    };
    Ok(KernelTransformReport {
        window,
        plus_vs_kernel: err(&ip, m_plus_kernel),
        minus_vs_kernel: err(&im, m_minus_kernel),
        plus_vs_exact: err(&ip, quarter_inverse_plus_exact),
        minus_vs_exact: err(&im, quarter_inverse_minus_exact),
    })
}

/// Unitary cosine transform `(1/√(2π)) ∫ w⁺(x) cos(ξx) dx` of the even part of
/// `w` over its window, sampled on `target`.
pub fn unitary_cosine_transform(w: &Field, target: &LineGrid) -> Result<Field> {
    let line = *w.grid().as_line()?;
    let e = even_part(w);
    let nodes = line.nodes();
    let scale = line.spacing() / (2.0 * PI).sqrt();
    let columns: Vec<Vec<f64>> = (0..w.components())
        .map(|c| {
            let col = e.component(c);
            target
                .nodes()
                .par_iter()
                .map(|&xi| nodes.iter().zip(&col).map(|(x, v)| v * (xi * x).cos()).sum::<f64>() * scale)
                .collect()
        })
        .collect();
    Ok(Field::from_components(Grid::Line(*target), &columns)?.with_tail(TailModel::zero()))
}

/// The two pairings `⟨w₁, M⁺ w₂⟩` and `⟨M⁺ 𝒞w₁, 𝒞w₂⟩`, where `𝒞` is the
/// unitary cosine transform. On even functions `𝒞 = 𝓕 = 𝓕^{-1}` is unitary, so
/// the second pairing is `⟨𝓕^{-1} M⁺ 𝓕^{-1} w₁, w₂⟩`. `M⁺` ignores odd parts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdjointReport {
    pub direct: f64,
    pub transformed: f64,
    pub difference: f64,
    pub relative: f64,
}

pub fn m_adjoint_check(w1: &Field, w2: &Field, freq_grid: &LineGrid) -> Result<AdjointReport> {
    w1.check_compatible(w2)?;
    let line = *w1.grid().as_line()?;
    let mw2 = m_plus(w2, &line)?;
    let direct = w1.inner(&mw2)?;
    let c1 = unitary_cosine_transform(w1, freq_grid)?;
    let c2 = unitary_cosine_transform(w2, freq_grid)?;
    let transformed = m_plus(&c1, freq_grid)?.inner(&c2)?;
    Ok(AdjointReport {
        direct,
        transformed,
        difference: direct - transformed,
        relative: super::relative(direct, transformed),
    })
}

/// Singular values of the Galerkin matrix `⟨b_j, M⁺ b_k⟩` on even bumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n_basis: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub condition: f64,
}

/// Assembles the Galerkin matrix of `M⁺` on `n_basis` even bumps
/// `b_k(x) = |x|^{-1/2} exp(-(ln|x| - μ_k)²/(2σ²))` with `μ_k` equally spaced
/// on `[-8, 8]` and `σ` equal to the spacing.
///
/// In `s = ln|x|` the operator is a convolution with
/// `κ(r) = K⁺(e^r) e^{r/2}`, so `A_jk = 4√π σ ∫ κ(r) e^{-(r - μ_k + μ_j)²/(4σ²)} dr`.
/// Bumps that are narrow in `ln|x|` would see the `e^{-π|τ|/2}` decay of the
/// Mellin symbol and make the matrix numerically singular.
pub fn even_subspace_matrix(n_basis: usize) -> Result<SpectrumReport> {
    if n_basis < 2 {
        return crate::error::invalid("need at least two basis functions");
    }
    let span = 16.0;
    let d = span / (n_basis - 1) as f64;
    let sigma = d;
    let kappa = |r: f64| PI.sqrt() * (1.0 + (2.0 * r).exp()).powf(-1.25) * (0.5 * r).exp();
    let opts = QuadOptions { abs_tol: 1e-16, rel_tol: 1e-13, max_intervals: 4000 };
    let entry = |shift: f64| {
        let f = |r: f64| kappa(r) * (-(r - shift).powi(2) / (4.0 * sigma * sigma)).exp();
        let w = 12.0 * sigma;
        let breaks = [shift - w, shift, shift + w, 0.0];
        let lo = (shift - w).min(-1.0);
        let hi = (shift + w).max(1.0);
        let mid = integrate_with_breaks(f, lo, hi, &breaks, opts).value;
        let right = integrate_to_infinity(f, hi, 1.0, opts).value;
        let left = integrate_to_infinity(|r| f(-r), -lo, 1.0, opts).value;
        4.0 * PI.sqrt() * sigma * (left + mid + right)
    };
    let diag: Vec<f64> =
        (0..2 * n_basis - 1).into_par_iter().map(|m| entry((m as f64 - (n_basis - 1) as f64) * d)).collect();
    let a = DMatrix::from_fn(n_basis, n_basis, |j, k| diag[k + n_basis - 1 - j]);
    let sv = a.singular_values();
    let sigma_max = sv.max();
    let sigma_min = sv.min();
    Ok(SpectrumReport { n_basis, sigma_min, sigma_max, condition: sigma_max / sigma_min })
}

//! Verifiers for the Pohozaev identities on the line, the circle and the
//! plane, and the `M±` integral operators.

mod mpm;
mod plane;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fracops::{
    derivative, frac_laplacian_circle, frac_laplacian_line_quadrature, poisson_kernel_circle, Convention,
};
use crate::geometry::{Field, FracExponent, Grid, TailModel};
use crate::quadrature::{integrate_to_infinity, QuadOptions};

pub use mpm::{
    even_subspace_matrix, kernel_transform_check, m_adjoint_check, m_minus, m_minus_kernel, m_minus_of, m_plus,
    m_plus_kernel, m_plus_of, quarter_inverse_minus_exact, quarter_inverse_plus_exact, unitary_cosine_transform,
    AdjointReport, KernelTransformReport, SpectrumReport,
};
pub use plane::{residual_plane, PlaneField};

/// Both sides of a Pohozaev identity per parameter value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub t_values: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `lhs - rhs`.
    pub residual: Vec<f64>,
    /// `|lhs - rhs| / max(lhs, rhs, 1e-14)`.
    pub relative_residual: Vec<f64>,
    /// Vector integrals whose squared norms are `lhs` / `rhs`.
    pub lhs_vectors: Vec<Vec<f64>>,
    pub rhs_vectors: Vec<Vec<f64>>,
    /// Size of the violation of the hypothesis of the identity.
    pub hypothesis_residual: f64,
}

impl PohozaevReport {
    fn push(&mut self, t: f64, lv: Vec<f64>, rv: Vec<f64>) {
        let lhs: f64 = lv.iter().map(|v| v * v).sum();
        let rhs: f64 = rv.iter().map(|v| v * v).sum();
        self.push_scalar(t, lhs, rhs);
        self.lhs_vectors.push(lv);
        self.rhs_vectors.push(rv);
    }

    fn push_scalar(&mut self, t: f64, lhs: f64, rhs: f64) {
        self.t_values.push(t);
        self.lhs.push(lhs);
        self.rhs.push(rhs);
        self.residual.push(lhs - rhs);
        self.relative_residual.push(relative(lhs, rhs));
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.relative_residual.iter().cloned().fold(0.0, f64::max)
    }
}

/// `|a - b| / max(|a|, |b|, 1e-14)`.
pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-14)
}

fn check_t(t_values: &[f64]) -> Result<()> {
    if t_values.is_empty() {
        return invalid("at least one t value is required");
    }
    if let Some(t) = t_values.iter().find(|t| !(**t > 0.0)) {
        return invalid(format!("t values must be positive, got {t}"));
    }
    Ok(())
}

/// Line identity `|∫ (x²-t²)/(x²+t²)² u|² = |∫ 2xt/(x²+t²)² u|²`.
///
/// The constant `u₀` (mean of the tail limits) is subtracted before
/// integrating; the kernels annihilate constants. The part of the integrals
/// beyond the window is taken from the tail model. The hypothesis residual is
/// `max |⟨u', (-Δ)^{1/2} u⟩|` over the nodes with `|x| ≤ L/2`, with `u'` from
/// fourth-order differences and `(-Δ)^{1/2}` from the singular-integral route.
pub fn residual_line(u: &Field, t_values: &[f64]) -> Result<PohozaevReport> {
    check_t(t_values)?;
    let line = *u.grid().as_line()?;
    let tails = u
        .tails()
        .ok_or_else(|| Error::MissingTailModel("line Pohozaev check needs the limits of u at ±∞".into()))?
        .to_vec();
    let m = u.components();
    let nodes = line.nodes();
    let h = line.spacing();
    let half = line.half_width();
    let u0: Vec<f64> = tails.iter().map(|t| 0.5 * (t.limit_left + t.limit_right)).collect();
    let opts = QuadOptions { abs_tol: 1e-16, rel_tol: 1e-12, max_intervals: 2000 };

    let sides: Vec<(Vec<f64>, Vec<f64>)> = t_values
        .par_iter()
        .map(|&t| {
            let kp = |x: f64| (x * x - t * t) / (x * x + t * t).powi(2);
            let km = |x: f64| 2.0 * x * t / (x * x + t * t).powi(2);
            let mut lv = vec![0.0; m];
            let mut rv = vec![0.0; m];
            for (j, &x) in nodes.iter().enumerate() {
                let (a, b) = (kp(x) * h, km(x) * h);
                for c in 0..m {
                    let d = u.value(j, c) - u0[c];
                    lv[c] += a * d;
                    rv[c] += b * d;
                }
            }
            for c in 0..m {
                let tail = tails[c];
                let d = |x: f64| tail.eval(x) - u0[c];
                let right = |k: &dyn Fn(f64) -> f64| integrate_to_infinity(|x| k(x) * d(x), half, half, opts).value;
                let left = |k: &dyn Fn(f64) -> f64| integrate_to_infinity(|x| k(-x) * d(-x), half, half, opts).value;
                lv[c] += right(&kp) + left(&kp);
                rv[c] += right(&km) + left(&km);
            }
            (lv, rv)
        })
        .collect();

    let mut report = PohozaevReport::default();
    for (&t, (lv, rv)) in t_values.iter().zip(sides) {
        report.push(t, lv, rv);
    }
    report.hypothesis_residual = line_hypothesis_residual(u, &tails)?;
    Ok(report)
}

fn line_hypothesis_residual(u: &Field, tails: &[TailModel]) -> Result<f64> {
    let line = *u.grid().as_line()?;
    let n = line.n_points();
    let h = line.spacing();
    let half_lap = frac_laplacian_line_quadrature(u, FracExponent::HALF, Convention::Normalized)?;
    let mut worst = 0.0f64;
    for j in 0..n {
        let x = line.node(j);
        if x.abs() > 0.5 * line.half_width() {
            continue;
        }
        let mut dot = 0.0;
        for (c, tail) in tails.iter().enumerate() {
            let at = |k: i64| {
                let i = j as i64 + k;
                if i < 0 || i >= n as i64 {
                    tail.eval(x + k as f64 * h)
                } else {
                    u.value(i as usize, c)
                }
            };
            let du = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
            dot += du * half_lap.value(j, c);
        }
        worst = worst.max(dot.abs());
    }
    Ok(worst)
}

/// Fourier moments `u₁ = (1/2π) ∫ u cos θ`, `u₋₁ = (1/2π) ∫ u sin θ` and the
/// identities `|u₁| = |u₋₁|`, `u₁ · u₋₁ = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeReport {
    pub u1: Vec<f64>,
    pub u_minus1: Vec<f64>,
    pub norm_gap: f64,
    pub dot: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleReport {
    pub identity: PohozaevReport,
    pub modes: ModeReport,
}

fn circle_hypothesis_residual(u: &Field) -> Result<f64> {
    let du = derivative(u)?;
    let lu = frac_laplacian_circle(u, FracExponent::HALF)?;
    Ok((0..u.n_points())
        .map(|j| du.row(j).iter().zip(lu.row(j)).map(|(a, b)| a * b).sum::<f64>().abs())
        .fold(0.0, f64::max))
}

/// Circle identity `|∫ u cos θ|² = |∫ u sin θ|²` with the mode report.
pub fn residual_circle(u: &Field) -> Result<CircleReport> {
    let g = *u.grid().as_circle()?;
    let m = u.components();
    let h = g.spacing();
    let mut cv = vec![0.0; m];
    let mut sv = vec![0.0; m];
    for (j, th) in g.nodes().into_iter().enumerate() {
        let (s, c) = th.sin_cos();
        for k in 0..m {
            cv[k] += u.value(j, k) * c * h;
            sv[k] += u.value(j, k) * s * h;
        }
    }
    let u1: Vec<f64> = cv.iter().map(|v| v / (2.0 * PI)).collect();
    let um: Vec<f64> = sv.iter().map(|v| v / (2.0 * PI)).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let modes = ModeReport {
        norm_gap: (norm(&u1) - norm(&um)).abs(),
        dot: u1.iter().zip(&um).map(|(a, b)| a * b).sum::<f64>().abs(),
        u1,
        u_minus1: um,
    };
    let mut identity = PohozaevReport::default();
    identity.push(0.0, cv, sv);
    identity.t_values.clear();
    identity.hypothesis_residual = circle_hypothesis_residual(u)?;
    Ok(CircleReport { identity, modes })
}

/// Circle identity `|∫ ∂_t F(t,θ) u| = |∫ ∂_θ F(t,θ) u|` with the series kernel;
/// `lhs` / `rhs` hold the squared norms.
pub fn residual_circle_t(u: &Field, t_values: &[f64]) -> Result<PohozaevReport> {
    check_t(t_values)?;
    let g = *u.grid().as_circle()?;
    let m = u.components();
    let h = g.spacing();
    let nodes = g.nodes();
    let sides: Vec<Result<(Vec<f64>, Vec<f64>)>> = t_values
        .par_iter()
        .map(|&t| {
            let mut lv = vec![0.0; m];
            let mut rv = vec![0.0; m];
            for (j, &th) in nodes.iter().enumerate() {
                let k = poisson_kernel_circle(t, th)?;
                for c in 0..m {
                    lv[c] += k.dt * u.value(j, c) * h;
                    rv[c] += k.dtheta * u.value(j, c) * h;
                }
            }
            Ok((lv, rv))
        })
        .collect();
    let mut report = PohozaevReport::default();
    for (&t, s) in t_values.iter().zip(sides) {
        let (lv, rv) = s?;
        report.push(t, lv, rv);
    }
    report.hypothesis_residual = circle_hypothesis_residual(u)?;
    Ok(report)
}

/// `Π^{-1}` as a two-component line field with its tail model.
pub fn inverse_stereographic_field(grid: Grid) -> Result<Field> {
    Field::from_fn_vec(grid, 2, |x| {
        let (a, b) = crate::stereo::unproject(x);
        vec![a, b]
    })?
    .with_tails(vec![
        TailModel::decaying(1.0, -2.0, 2.0),
        TailModel { exponent: 2.0, limit_left: -1.0, limit_right: -1.0, coeff_left: 2.0, coeff_right: 2.0 },
    ])
}

#[cfg(test)]
mod tests;

//! Fractional Laplacians, the Riesz transform, inverse fractional Laplacians
//! and the Poisson kernels of the half-plane and the disc.
//!
//! The canonical fractional Laplacian is the Fourier multiplier `|ξ|^{2s}`.
//! The singular-integral route evaluates
//! `C · PV ∫ (f(t) - f(y)) |t - y|^{-1-2s} dy` with `C = 1` ([`Convention::Paper`])
//! or `C = C(1, s)` ([`Convention::Normalized`]), which matches the multiplier.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Field, FracExponent, Grid, LineGrid, TailModel};
use crate::quadrature::{integrate_to_infinity, integrate_with_breaks, zeta, QuadOptions};
use crate::spectral::{self, Parity};

/// Constant in front of the singular integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Constant-free kernel `|t - y|^{-1-2s}`.
    #[default]
    Paper,
    /// Kernel scaled by `C(1, s)` so the result equals the `|ξ|^{2s}` multiplier.
    Normalized,
}

impl Convention {
    pub fn constant(self, s: FracExponent) -> f64 {
        match self {
            Convention::Paper => 1.0,
            Convention::Normalized => normalization_constant(s),
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Convention::Paper),
            "normalized" => Ok(Convention::Normalized),
            other => invalid(format!("unknown convention '{other}' (expected paper or normalized)")),
        }
    }
}

/// `C(1, s) = 4^s Γ(1/2 + s) / (√π |Γ(-s)|)`; zero at `s = 1`.
pub fn normalization_constant(s: FracExponent) -> f64 {
    let s = s.value();
    if s >= 1.0 {
        return 0.0;
    }
    4f64.powf(s) * gamma(0.5 + s) / (PI.sqrt() * gamma(-s).abs())
}

/// `(-Δ)^s` on the circle: multiplier `|n|^{2s}`.
pub fn frac_laplacian_circle(f: &Field, s: FracExponent) -> Result<Field> {
    f.grid().as_circle()?;
    multiplier(f, Parity::Even, |xi| Complex64::new(xi.abs().powf(2.0 * s.value()), 0.0))
}

/// `(-Δ)^s` on the line through the periodic multiplier `|πk/L|^{2s}`.
///
/// Treating the window as one period introduces an error of order
/// `M · L^{-1-2s}` for a field of mass `M`, plus `O(L^{-d})` from tails decaying
/// like `|x|^{-d}`. When the field carries an integrable tail model the leading
/// image term `C(1,s) · M · Σ_{p≠0} |x + 2pL|^{-1-2s}` is added back.
pub fn frac_laplacian_line_spectral(f: &Field, s: FracExponent) -> Result<Field> {
    let grid = *f.grid().as_line()?;
    warn_if_untailed(f, &grid);
    let periodic = multiplier(f, Parity::Even, |xi| Complex64::new(xi.abs().powf(2.0 * s.value()), 0.0))?;
    let Some(tails) = f.tails() else { return Ok(periodic) };
    if !tails.iter().all(TailModel::integrable) || s.value() >= 1.0 {
        return Ok(periodic);
    }
    let c = normalization_constant(s);
    let a = 1.0 + 2.0 * s.value();
    let image: Vec<f64> = grid.nodes().iter().map(|&x| image_sum(x, grid.half_width(), a)).collect();
    let mut samples = periodic.samples().to_vec();
    let m = f.components();
    for (comp, tail) in tails.iter().enumerate() {
        let mass = f.integral(comp) + tail_mass(tail, grid.half_width());
        for (j, w) in image.iter().enumerate() {
            samples[j * m + comp] += c * mass * w;
        }
    }
    periodic.with_samples(samples)
}

/// Canonical `(-Δ)^s` on either geometry.
pub fn frac_laplacian(f: &Field, s: FracExponent) -> Result<Field> {
    match f.grid() {
        Grid::Circle(_) => frac_laplacian_circle(f, s),
        Grid::Line(_) => frac_laplacian_line_spectral(f, s),
    }
}

fn warn_if_untailed(f: &Field, grid: &LineGrid) {
    if f.tails().is_some() {
        return;
    }
    let n = grid.n_points();
    let edge = f.row(0).iter().chain(f.row(n - 1)).fold(0.0f64, |a, v| a.max(v.abs()));
    if edge > 1e-6 * f.max_abs() {
        log::warn!(
            "line field without tail model has boundary values up to {edge:.3e}; periodisation error is not controlled"
        );
    }
}

/// `Σ_{p≠0} |x + 2pL|^{-a}` for `|x| ≤ L`, `a > 1`.
fn image_sum(x: f64, half_width: f64, a: f64) -> f64 {
    const TERMS: usize = 200;
    let period = 2.0 * half_width;
    if a == 2.0 {
        // Σ_p (x + pP)^{-2} = (π/P)² / sin²(πx/P); near 0 use the series of 1/sin²u - 1/u².
        let k = PI / period;
        let u = k * x;
        let u2 = u * u;
        let reduced = if u.abs() < 0.1 {
            1.0 / 3.0 + u2 * (1.0 / 15.0 + u2 * (2.0 / 189.0 + u2 * (1.0 / 675.0 + u2 * 2.0 / 10395.0)))
        } else {
            1.0 / u.sin().powi(2) - 1.0 / u2
        };
        return k * k * reduced;
    }
    let mut acc = 0.0;
    for p in 1..=TERMS {
        let base = p as f64 * period;
        acc += (base + x).powf(-a) + (base - x).powf(-a);
    }
    let edge = (TERMS as f64 + 0.5) * period;
    acc + ((edge + x).powf(1.0 - a) + (edge - x).powf(1.0 - a)) / (period * (a - 1.0))
}

/// `∫_{|y|>L} tail(y) dy` for an integrable tail.
fn tail_mass(tail: &TailModel, half_width: f64) -> f64 {
    if tail.coeff_left == 0.0 && tail.coeff_right == 0.0 {
        return 0.0;
    }
    (tail.coeff_left + tail.coeff_right) * half_width.powf(1.0 - tail.exponent) / (tail.exponent - 1.0)
}

fn multiplier<M>(f: &Field, parity: Parity, m: M) -> Result<Field>
where
    M: Fn(f64) -> Complex64 + Sync,
{
    let grid = *f.grid();
    let columns: Vec<Vec<f64>> = f
        .spectra()
        .par_iter()
        .map(|coeffs| spectral::apply_multiplier_coeffs(&spectral::chop(coeffs), parity, |k| m(grid.frequency(k))))
        .collect();
    let out = Field::from_components(grid, &columns)?;
    Ok(match f.tails() {
        Some(t) => out.with_tails(t.to_vec())?,
        None => out,
    })
}

/// Riesz transform with multiplier `-i sign(ξ)`, so `ℛ² = -I` on mean-zero fields.
pub fn riesz_transform(f: &Field) -> Result<Field> {
    multiplier(f, Parity::Odd, |xi| Complex64::new(0.0, if xi == 0.0 { 0.0 } else { -xi.signum() }))
        .map(Field::without_tail)
}

/// Spectral derivative, multiplier `iξ`.
pub fn derivative(f: &Field) -> Result<Field> {
    multiplier(f, Parity::Odd, |xi| Complex64::new(0.0, xi)).map(Field::without_tail)
}

/// `(-Δ)^{-s}` with multiplier `|ξ|^{-2s}` on nonzero frequencies and the zero mode removed.
/// Circle inputs must be mean-zero.
pub fn inverse_frac_laplacian(f: &Field, s: FracExponent) -> Result<Field> {
    if let Grid::Circle(_) = f.grid() {
        let scale = f.max_abs().max(f64::MIN_POSITIVE);
        for c in 0..f.components() {
            let mean = f.spectrum(c)[0].re;
            if mean.abs() > 1e-12 * scale {
                return invalid(format!(
                    "inverse fractional Laplacian needs a mean-zero circle field, component {c} has mean {mean:.3e}"
                ));
            }
        }
    }
    multiplier(f, Parity::Even, |xi| {
        if xi == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(xi.abs().powf(-2.0 * s.value()), 0.0)
        }
    })
    .map(Field::without_tail)
}

/// `(-Δ)^{-1/4}`.
pub fn inverse_quarter_laplacian(f: &Field) -> Result<Field> {
    inverse_frac_laplacian(f, FracExponent::QUARTER)
}

/// Singular-integral `(-Δ)^s` of a line field, `s ∈ (0, 1/2]`.
///
/// The window contributes a midpoint sum over all other nodes (evaluated as
/// one FFT convolution) plus the generalised Euler–Maclaurin correction
/// `f''(x) h^{2-2s} ζ(2s - 1)` for the singular cell; the exterior `|y| > L`
/// is integrated against the tail model.
pub fn frac_laplacian_line_quadrature(f: &Field, s: FracExponent, convention: Convention) -> Result<Field> {
    let grid = *f.grid().as_line()?;
    if s.value() > 0.5 {
        return invalid(format!("quadrature route supports s in (0, 1/2], got {}", s.value()));
    }
    let tails = f
        .tails()
        .ok_or_else(|| Error::MissingTailModel("quadrature route needs a tail model to close the integral".into()))?
        .to_vec();
    let n = grid.n_points();
    let h = grid.spacing();
    let sv = s.value();
    let a = 1.0 + 2.0 * sv;
    let weights: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { h * (k as f64 * h).powf(-a) }).collect();
    let mut prefix = vec![0.0; n];
    for k in 1..n {
        prefix[k] = prefix[k - 1] + weights[k];
    }
    let kernel_hat = {
        let mut ker = vec![Complex64::new(0.0, 0.0); 2 * n];
        for k in 1..n {
            ker[k].re = weights[k];
            ker[2 * n - k].re = weights[k];
        }
        spectral::forward_in_place(&mut ker);
        ker
    };
    let local = h.powf(2.0 - 2.0 * sv) * zeta(2.0 * sv - 1.0);
    let c = convention.constant(s);
    let nodes = grid.nodes();
    let half = grid.half_width();

    let columns: Vec<Vec<f64>> = (0..f.components())
        .map(|comp| {
            let vals = f.component(comp);
            let tail = tails[comp];
            let mut buf: Vec<Complex64> =
                (0..2 * n).map(|j| Complex64::new(if j < n { vals[j] } else { 0.0 }, 0.0)).collect();
            spectral::forward_in_place(&mut buf);
            buf.iter_mut().zip(&kernel_hat).for_each(|(b, k)| *b *= k);
            spectral::inverse_in_place(&mut buf);
            let inv = 1.0 / (2 * n) as f64;
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let fi = vals[i];
                    let window = fi * (prefix[i] + prefix[n - 1 - i]) - buf[i].re * inv;
                    let left = if i == 0 { tail.eval(nodes[0] - h) } else { vals[i - 1] };
                    let right = if i + 1 == n { tail.eval(nodes[n - 1] + h) } else { vals[i + 1] };
                    let f2 = (left - 2.0 * fi + right) / (h * h);
                    c * (window + f2 * local + exterior(&tail, nodes[i], fi, half, sv))
                })
                .collect()
        })
        .collect();
    Field::from_components(Grid::Line(grid), &columns)
}

/// `∫_{|y|>L} (f_i - T(y)) |x - y|^{-1-2s} dy`.
fn exterior(tail: &TailModel, x: f64, fi: f64, half: f64, s: f64) -> f64 {
    let a = 1.0 + 2.0 * s;
    let dr = half - x;
    let dl = half + x;
    let constant_part = fi * (dr.powf(-2.0 * s) + dl.powf(-2.0 * s)) / (2.0 * s);
    let opts = QuadOptions { abs_tol: 1e-16, rel_tol: 1e-11, max_intervals: 2000 };
    let right = if tail.limit_right == 0.0 && tail.coeff_right == 0.0 {
        0.0
    } else {
        integrate_to_infinity(|y| tail.eval(y) * (y - x).powf(-a), half, dr.max(1e-300), opts).value
    };
    let left = if tail.limit_left == 0.0 && tail.coeff_left == 0.0 {
        0.0
    } else {
        integrate_to_infinity(|y| tail.eval(-y) * (y + x).powf(-a), half, dl.max(1e-300), opts).value
    };
    constant_part - right - left
}

/// Singular-integral `(-Δ)^s f(t)` of a function given as a closure,
/// `s ∈ (0, 1/2]`. `breaks` lists points where `f` is not smooth.
///
/// Writes the integral as `∫_0^∞ (2f(t) - f(t+r) - f(t-r)) r^{-1-2s} dr`,
/// replaces `[0, δ]` by its Taylor value and integrates the rest adaptively.
pub fn frac_laplacian_point<F: Fn(f64) -> f64>(
    f: F,
    t: f64,
    s: FracExponent,
    convention: Convention,
    breaks: &[f64],
) -> f64 {
    let sv = s.value();
    let a = 1.0 + 2.0 * sv;
    let scale = t.abs().max(1.0);
    let nearest = breaks.iter().map(|b| (t - b).abs()).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    let delta = (1e-4 * scale).min(0.25 * nearest).max(1e-9 * scale);
    let ft = f(t);
    let f2 = (f(t + delta) - 2.0 * ft + f(t - delta)) / (delta * delta);
    let near = -f2 * delta.powf(2.0 - 2.0 * sv) / (2.0 - 2.0 * sv);

    let d = |r: f64| (2.0 * ft - f(t + r) - f(t - r)) * r.powf(-a);
    let r_max = 4.0 * scale;
    let mut pts: Vec<f64> = breaks.iter().map(|b| (t - b).abs()).filter(|r| *r > delta && *r < r_max).collect();
    let mut r = delta;
    while r < r_max {
        pts.push(r);
        r *= 4.0;
    }
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 8000 };
    let mid = integrate_with_breaks(d, delta, r_max, &pts, opts).value;
    let far_const = 2.0 * ft * r_max.powf(-2.0 * sv) / (2.0 * sv);
    let far_var = integrate_to_infinity(|r| (f(t + r) + f(t - r)) * r.powf(-a), r_max, r_max, opts).value;
    convention.constant(s) * (near + mid + far_const - far_var)
}

/// Poisson kernel of the upper half-plane and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineKernelEval {
    pub t: f64,
    pub x: f64,
    pub value: f64,
    pub dt: f64,
    pub dx: f64,
}

/// `G(t, x) = t / (π (x² + t²))`, `∂_t G`, `∂_x G`.
pub fn poisson_kernel_line(t: f64, x: f64) -> Result<LineKernelEval> {
    if !(t > 0.0) {
        return invalid(format!("Poisson kernel needs t > 0, got {t}"));
    }
    let r2 = x * x + t * t;
    Ok(LineKernelEval {
        t,
        x,
        value: t / (PI * r2),
        dt: (x * x - t * t) / (PI * r2 * r2),
        dx: -2.0 * x * t / (PI * r2 * r2),
    })
}

/// Poisson kernel of the disc in the variables `(t, θ)` with `r = e^{-t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleKernelEval {
    pub t: f64,
    pub theta: f64,
    pub value: f64,
    pub dt: f64,
    pub dtheta: f64,
}

/// `F(t, θ) = (1/2π) Σ_n e^{-t|n|} e^{inθ}` and its derivatives, summed until
/// the terms fall below machine precision.
pub fn poisson_kernel_circle(t: f64, theta: f64) -> Result<CircleKernelEval> {
    if !(t > 0.0) {
        return invalid(format!("Poisson kernel needs t > 0, got {t}"));
    }
    let terms = ((40.0 / t).ceil() as usize).max(1);
    if terms > 50_000_000 {
        return invalid(format!("t = {t} is too small for direct series summation"));
    }
    let (mut v, mut dt, mut dth) = (0.0, 0.0, 0.0);
    for n in (1..=terms).rev() {
        let nf = n as f64;
        let w = (-t * nf).exp();
        let (sn, cn) = (nf * theta).sin_cos();
        v += w * cn;
        dt -= nf * w * cn;
        dth -= nf * w * sn;
    }
    Ok(CircleKernelEval { t, theta, value: (1.0 + 2.0 * v) / (2.0 * PI), dt: dt / PI, dtheta: dth / PI })
}

/// The closed forms `(e^{2t}-1)/(e^{2t}-2e^t cos θ+1)` with the matching
/// derivatives. They equal `2π` times [`poisson_kernel_circle`].
pub fn poisson_kernel_circle_closed_form(t: f64, theta: f64) -> Result<CircleKernelEval> {
    if !(t > 0.0) {
        return invalid(format!("Poisson kernel needs t > 0, got {t}"));
    }
    let e = t.exp();
    let e2 = e * e;
    let (sn, cs) = theta.sin_cos();
    let den = e2 - 2.0 * e * cs + 1.0;
    Ok(CircleKernelEval {
        t,
        theta,
        value: (e2 - 1.0) / den,
        dt: -2.0 * e * (e2 * cs - 2.0 * e + cs) / (den * den),
        dtheta: -(e2 - 1.0) * 2.0 * e * sn / (den * den),
    })
}

#[cfg(test)]
mod tests;

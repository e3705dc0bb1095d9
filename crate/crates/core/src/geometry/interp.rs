//! Point interpolation on the two grid types.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LineGrid;
use crate::spectral::signed_mode;

/// Interpolation rule for circle fields. Line fields always use the local
/// Lagrange rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// Direct evaluation of the trigonometric interpolant.
    BandLimited,
    /// Periodic Fritsch–Carlson cubic: shape preserving, second order.
    #[default]
    MonotoneCubic,
    /// Periodic 8-point Lagrange.
    Lagrange,
}

const STENCIL: usize = 8;

// Barycentric weights of 8 equispaced nodes: (-1)^k C(7, k).
const BARY: [f64; STENCIL] = [1.0, -7.0, 21.0, -35.0, 35.0, -21.0, 7.0, -1.0];

/// Lagrange interpolation on 8 equispaced values `v[k]` at offsets `k`, evaluated at `u`.
fn lagrange8(v: &[f64], u: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..STENCIL {
        let d = u - k as f64;
        if d == 0.0 {
            return v[k];
        }
        let w = BARY[k] / d;
        num += w * v[k];
        den += w;
    }
    num / den
}

/// 8-point Lagrange interpolation of line samples; the stencil is clamped
/// inside the grid near the ends.
pub fn lagrange_line(grid: &LineGrid, values: &[f64], x: f64) -> f64 {
    let n = values.len();
    let pos = (x - grid.node(0)) / grid.spacing();
    let start = (pos.floor() as i64 - 3).clamp(0, (n - STENCIL) as i64) as usize;
    lagrange8(&values[start..start + STENCIL], pos - start as f64)
}

fn periodic_position(n: usize, theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    t / (2.0 * PI) * n as f64
}

/// Periodic 8-point Lagrange interpolation on the uniform circle grid.
pub fn lagrange_periodic(values: &[f64], theta: f64) -> f64 {
    let n = values.len();
    let pos = periodic_position(n, theta);
    let base = pos.floor() as i64 - 3;
    let mut v = [0.0; STENCIL];
    for (k, slot) in v.iter_mut().enumerate() {
        *slot = values[(base + k as i64).rem_euclid(n as i64) as usize];
    }
    lagrange8(&v, pos - base as f64)
}

/// Periodic monotone cubic Hermite interpolation (Fritsch–Carlson slopes).
pub fn monotone_cubic_periodic(values: &[f64], theta: f64) -> f64 {
    let n = values.len();
    let pos = periodic_position(n, theta);
    let j = (pos.floor() as usize) % n;
    let t = pos - pos.floor();
    let at = |i: i64| values[i.rem_euclid(n as i64) as usize];
    let slope = |i: i64| {
        let d0 = at(i) - at(i - 1);
        let d1 = at(i + 1) - at(i);
        if d0 * d1 <= 0.0 {
            0.0
        } else {
            // Harmonic mean keeps the interpolant monotone on each cell.
            2.0 * d0 * d1 / (d0 + d1)
        }
    };
    let (y0, y1) = (at(j as i64), at(j as i64 + 1));
    let (m0, m1) = (slope(j as i64), slope(j as i64 + 1));
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
}

/// Evaluates the trigonometric interpolant with normalised coefficients at `θ`.
/// The Nyquist coefficient contributes `Re(c) cos(Nθ/2)`.
pub fn trig_eval(coeffs: &[Complex64], theta: f64) -> f64 {
    let n = coeffs.len();
    let mut acc = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let mode = signed_mode(k, n) as f64;
        if n % 2 == 0 && k == n / 2 {
            acc += c.re * (mode * theta).cos();
        } else {
            acc += (c * Complex64::from_polar(1.0, mode * theta)).re;
        }
    }
    acc
}

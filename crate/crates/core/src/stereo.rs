//! Stereographic transfer between line and circle fields.
//!
//! `Π(cos θ, sin θ) = cos θ / (1 + sin θ)` sends the circle minus the south
//! pole `θ = -π/2` to the line, with inverse
//! `Π^{-1}(x) = (2x / (1 + x²), (1 - x²) / (1 + x²))`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fracops::{derivative, frac_laplacian_circle, frac_laplacian_line_spectral};
use crate::geometry::{Field, FracExponent, Grid, Interpolation, LineGrid, TailModel};

/// `Π(p)` for a point of the unit circle other than `(0, -1)`.
pub fn project(p: (f64, f64)) -> Result<f64> {
    let (c, s) = p;
    if 1.0 + s <= 1e-300 {
        return Err(Error::InvalidArgument("the south pole (0, -1) has no stereographic image".into()));
    }
    Ok(c / (1.0 + s))
}

/// `Π` in terms of the angle, with the pole mapped to `±∞` by the side it is approached from.
pub fn project_angle(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    if 1.0 + s == 0.0 {
        return if c >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    // cos θ / (1 + sin θ) = (1 - sin θ) / cos θ; use the stable branch.
    if s >= 0.0 {
        c / (1.0 + s)
    } else {
        (1.0 - s) / c
    }
}

pub fn unproject(x: f64) -> (f64, f64) {
    if x.is_infinite() {
        return (0.0, -1.0);
    }
    let d = 1.0 + x * x;
    (2.0 * x / d, (1.0 - x * x) / d)
}

/// Angle of `Π^{-1}(x)` in `(-π/2, 3π/2)`.
pub fn unproject_angle(x: f64) -> f64 {
    // Π^{-1}(x) = e^{iθ} with θ = π/2 - 2 arctan x.
    FRAC_PI_2 - 2.0 * x.atan()
}

/// `|d Π^{-1}/dx|` at `x = Π(θ)`, which equals `1 + sin θ`.
pub fn arc_length_density(x: f64) -> f64 {
    2.0 / (1.0 + x * x)
}

/// `v = u ∘ Π` sampled on `target`. Nodes whose image leaves the line window
/// are filled from the tail model; the south pole takes the mean of the two limits.
pub fn pushforward(u: &Field, target: &Grid) -> Result<Field> {
    let line = *u.grid().as_line()?;
    target.as_circle()?;
    let tails =
        u.tails().ok_or_else(|| Error::MissingTailModel("pushforward needs the limits of u at ±∞".into()))?.to_vec();
    let m = u.components();
    let cols: Vec<Vec<f64>> = (0..m).map(|c| u.component(c)).collect();
    let mut samples = Vec::with_capacity(target.n_points() * m);
    for theta in target.nodes() {
        let x = project_angle(theta);
        for c in 0..m {
            let v = if x.is_infinite() {
                0.5 * (tails[c].limit_left + tails[c].limit_right)
            } else if x.abs() > line.half_width() {
                tails[c].eval(x)
            } else {
                crate::geometry::lagrange_line(&line, &cols[c], x)
            };
            samples.push(v);
        }
    }
    Field::new(*target, m, samples)
}

/// `u = v ∘ Π^{-1}` on `target`, with a tail model read off the behaviour of
/// `v` at the south pole: `u(x) ≈ v(-π/2) ± 2 v'(-π/2) / |x|`.
pub fn pullback(v: &Field, target: &LineGrid, method: Interpolation) -> Result<Field> {
    v.grid().as_circle()?;
    let m = v.components();
    let dv = derivative(v)?;
    let grid = Grid::Line(*target);
    let mut samples = Vec::with_capacity(target.n_points() * m);
    for x in target.nodes() {
        let theta = unproject_angle(x);
        for c in 0..m {
            samples.push(v.eval(c, theta, method)?);
        }
    }
    let mut tails = Vec::with_capacity(m);
    for c in 0..m {
        let v0 = v.eval(c, -FRAC_PI_2, Interpolation::BandLimited)?;
        let d0 = dv.eval(c, -FRAC_PI_2, Interpolation::BandLimited)?;
        tails.push(TailModel {
            exponent: 1.0,
            limit_left: v0,
            limit_right: v0,
            coeff_left: -2.0 * d0,
            coeff_right: 2.0 * d0,
        });
    }
    Field::new(grid, m, samples)?.with_tails(tails)
}

/// Outcome of comparing `(-Δ)^{1/2}_{S¹}(u∘Π)` with `((-Δ)^{1/2}_ℝ u)∘Π / (1 + sin θ)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferReport {
    pub excluded_arc: f64,
    pub n_compared: usize,
    pub max_abs_discrepancy: f64,
    pub max_rel_discrepancy: f64,
    pub lhs_scale: f64,
    pub theta: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// Checks the half-Laplacian transfer identity on every node of `circle`
/// outside the arc `|θ + π/2| < excluded_arc`.
pub fn transfer_identity_check(u: &Field, circle: &Grid, excluded_arc: f64) -> Result<TransferReport> {
    if !(excluded_arc > 0.0 && excluded_arc < PI) {
        return invalid(format!("excluded arc must lie in (0, π), got {excluded_arc}"));
    }
    let line = *u.grid().as_line()?;
    let v = pushforward(u, circle)?;
    let lhs_field = frac_laplacian_circle(&v, FracExponent::HALF)?;
    let lu = frac_laplacian_line_spectral(u, FracExponent::HALF)?;
    let lu_cols: Vec<Vec<f64>> = (0..u.components()).map(|c| lu.component(c)).collect();
    let (mut theta, mut lhs, mut rhs) = (Vec::new(), Vec::new(), Vec::new());
    for (j, t) in circle.nodes().into_iter().enumerate() {
        let dist = (t + FRAC_PI_2).rem_euclid(2.0 * PI);
        if dist.min(2.0 * PI - dist) < excluded_arc {
            continue;
        }
        let x = project_angle(t);
        if x.abs() > line.half_width() {
            return invalid(format!(
                "node θ = {t:.4} maps to x = {x:.3e} outside the line window; widen the excluded arc"
            ));
        }
        let w = 1.0 + t.sin();
        for (c, col) in lu_cols.iter().enumerate() {
            theta.push(t);
            lhs.push(lhs_field.value(j, c));
            rhs.push(crate::geometry::lagrange_line(&line, col, x) / w);
        }
    }
    let scale = lhs.iter().chain(&rhs).fold(0.0f64, |a, v| a.max(v.abs()));
    let max_abs = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(TransferReport {
        excluded_arc,
        n_compared: lhs.len(),
        max_abs_discrepancy: max_abs,
        max_rel_discrepancy: max_abs / scale.max(1e-14),
        lhs_scale: scale,
        theta,
        lhs,
        rhs,
    })
}

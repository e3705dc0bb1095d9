//! Compensated bilinear operators built from `L = (-Δ)^{1/4}` and the Riesz
//! transform `ℛ`:
//!
//! - `T(Q, v) = L(Qv) - Q Lv + (LQ) v`
//! - `S(Q, v) = L(Qv) - ℛ(Q ℛ Lv) + ℛ((LQ) ℛv)`
//! - `F(Q, v) = ℛQ ℛv - Qv`
//! - `Λ(Q, v) = Qv + ℛ(Q ℛv)`
//!
//! `Q` is scalar (one component) or a `k × k` matrix stored row-major in `k²`
//! components acting on a `k`-component `v`. Products are formed on a grid
//! padded by 3/2 so quadratic terms do not alias.

use crate::error::{Error, Result};
use crate::fracops::{frac_laplacian, riesz_transform};
use crate::geometry::{Field, FracExponent, Grid};
use crate::norms::{lp_norm, sobolev_half_seminorm, Region};
use crate::spectral;

fn quarter(f: &Field) -> Result<Field> {
    frac_laplacian(f, FracExponent::QUARTER)
}

fn padded_grid(grid: &Grid) -> Result<Grid> {
    let n = grid.n_points();
    let m = (3 * n / 2 + 1) & !1;
    match grid {
        Grid::Circle(_) => Grid::circle(m),
        Grid::Line(g) => Grid::line(g.half_width(), m),
    }
}

fn upsample(col: &[f64], m: usize) -> Vec<f64> {
    spectral::inverse_real(&spectral::resize_spectrum(&spectral::forward(col), m))
}

fn downsample(col: &[f64], n: usize) -> Vec<f64> {
    spectral::inverse_real(&spectral::resize_spectrum(&spectral::forward(col), n))
}

/// Shape of the product `Qv`: `(k, scalar)`.
fn product_shape(q: &Field, v: &Field) -> Result<(usize, bool)> {
    if q.grid() != v.grid() {
        return Err(Error::ShapeMismatch("Q and v live on different grids".into()));
    }
    let k = v.components();
    match q.components() {
        1 => Ok((k, true)),
        mq if mq == k * k => Ok((k, false)),
        mq => Err(Error::ShapeMismatch(format!("Q has {mq} components; expected 1 or {} for v with {k}", k * k))),
    }
}

/// Dealiased pointwise product `Qv`.
pub fn product(q: &Field, v: &Field) -> Result<Field> {
    let (k, scalar) = product_shape(q, v)?;
    let grid = *v.grid();
    let n = grid.n_points();
    let m = padded_grid(&grid)?.n_points();
    let qc: Vec<Vec<f64>> = q.columns().iter().map(|c| upsample(c, m)).collect();
    let vc: Vec<Vec<f64>> = v.columns().iter().map(|c| upsample(c, m)).collect();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut acc = vec![0.0; m];
        for j in 0..k {
            if scalar && i != j {
                continue;
            }
            let qij = if scalar { &qc[0] } else { &qc[i * k + j] };
            for (a, (x, y)) in acc.iter_mut().zip(qij.iter().zip(&vc[j])) {
                *a += x * y;
            }
        }
        out.push(downsample(&acc, n));
    }
    Field::from_components(grid, &out)
}

fn sum3(a: &Field, sa: f64, b: &Field, sb: f64, c: &Field, sc: f64) -> Result<Field> {
    a.linear_combination(sa, b, sb)?.linear_combination(1.0, c, sc)
}

pub fn op_t(q: &Field, v: &Field) -> Result<Field> {
    let qv = product(q, v)?;
    let a = quarter(&qv)?;
    let b = product(q, &quarter(v)?)?;
    let c = product(&quarter(q)?, v)?;
    sum3(&a, 1.0, &b, -1.0, &c, 1.0).map(Field::without_tail)
}

pub fn op_s(q: &Field, v: &Field) -> Result<Field> {
    let a = quarter(&product(q, v)?)?;
    let b = riesz_transform(&product(q, &riesz_transform(&quarter(v)?)?)?)?;
    let c = riesz_transform(&product(&quarter(q)?, &riesz_transform(v)?)?)?;
    sum3(&a, 1.0, &b, -1.0, &c, 1.0).map(Field::without_tail)
}

pub fn op_f(q: &Field, v: &Field) -> Result<Field> {
    let a = product(&riesz_transform(q)?, &riesz_transform(v)?)?;
    let b = product(q, v)?;
    a.linear_combination(1.0, &b, -1.0).map(Field::without_tail)
}

pub fn op_lambda(q: &Field, v: &Field) -> Result<Field> {
    let a = product(q, v)?;
    let b = riesz_transform(&product(q, &riesz_transform(v)?)?)?;
    a.linear_combination(1.0, &b, 1.0).map(Field::without_tail)
}

/// `‖T(Q, v)‖_{L¹} / (‖Q‖_{Ḣ^{1/2}} ‖v‖_{L²})` on a circle grid.
pub fn compensation_ratio(q: &Field, v: &Field) -> Result<f64> {
    let t = op_t(q, v)?;
    let num = lp_norm(&t, 1.0, &Region::All)?;
    let den = sobolev_half_seminorm(q)? * lp_norm(v, 2.0, &Region::All)?;
    Ok(num / den)
}

pub mod oracle;

#[cfg(test)]
mod tests;

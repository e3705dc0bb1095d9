//! A sequence of solutions of `(-Δ)^{1/4} U = Ω U + Ω₁ U` with antisymmetric
//! `Ω` whose potentials lose their energy in the neck while `U` keeps its own.
//!
//! Built from the profiles `u = 1` on `[-1, 1]`, `u = |t|^{-1/2}` elsewhere,
//! and `v = (1+t²)^{-3/8}`, with `ω = (-Δ)^{1/4}u / v`,
//! `ω₁ = ((-Δ)^{1/4}v + ω u)/u`, `U_n = c_n U(n·)`, `Ω_n = √n Ω(n·)`.
//! All fractional operators use the constant-free kernel `|t - s|^{-3/2}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fit::linear_fit;
use crate::fracops::{frac_laplacian_line_quadrature, frac_laplacian_point, Convention};
use crate::geometry::{Field, FracExponent, Grid, LineGrid, TailModel};
use crate::norms::{lorentz_weighted, lp_weighted};
use crate::quadrature::{integrate_with_breaks, QuadOptions};

pub fn u_profile(t: f64) -> f64 {
    if t.abs() <= 1.0 {
        1.0
    } else {
        t.abs().powf(-0.5)
    }
}

pub fn v_profile(t: f64) -> f64 {
    let a = t.abs();
    if a > 1e8 {
        a.powf(-0.75) * (1.0 + 1.0 / (a * a)).powf(-0.375)
    } else {
        (1.0 + a * a).powf(-0.375)
    }
}

/// Samples of `u` and `v` with their power tails. Nodes are cell-centred, so
/// none falls on the kinks of `u` at `±1`.
pub fn build_profiles(grid: &LineGrid) -> Result<(Field, Field)> {
    let g = Grid::Line(*grid);
    let u = Field::from_fn(g, u_profile)?.with_tail(TailModel::decaying(0.5, 1.0, 1.0));
    let v = Field::from_fn(g, v_profile)?.with_tail(TailModel::decaying(0.75, 1.0, 1.0));
    Ok((u, v))
}

/// `(-Δ)^{1/4} u (t)` by the pointwise singular integral.
pub fn lu_point(t: f64) -> f64 {
    frac_laplacian_point(u_profile, t, FracExponent::QUARTER, Convention::Paper, &[-1.0, 1.0])
}

/// `(-Δ)^{1/4} v (t)` by the pointwise singular integral.
pub fn lv_point(t: f64) -> f64 {
    frac_laplacian_point(v_profile, t, FracExponent::QUARTER, Convention::Paper, &[])
}

pub fn omega_point(t: f64) -> f64 {
    lu_point(t) / v_profile(t)
}

pub fn omega1_point(t: f64) -> f64 {
    (lv_point(t) + omega_point(t) * u_profile(t)) / u_profile(t)
}

/// `(-Δ)^{1/4}u`, `(-Δ)^{1/4}v` and the potentials on a grid.
#[derive(Debug, Clone)]
pub struct Potentials {
    pub lu: Field,
    pub lv: Field,
    pub omega: Field,
    pub omega1: Field,
}

impl Potentials {
    /// `Ω = [[0, ω], [-ω, 0]]` at node `j`.
    pub fn big_omega(&self, j: usize) -> [[f64; 2]; 2] {
        let w = self.omega.value(j, 0);
        [[0.0, w], [-w, 0.0]]
    }

    /// `Ω₁ = [[0, 0], [ω₁, 0]]` at node `j`.
    pub fn big_omega1(&self, j: usize) -> [[f64; 2]; 2] {
        [[0.0, 0.0], [self.omega1.value(j, 0), 0.0]]
    }

    /// `max |Ω + Ωᵀ|` over the nodes.
    pub fn antisymmetry_defect(&self) -> f64 {
        (0..self.omega.n_points())
            .map(|j| {
                let o = self.big_omega(j);
                (o[0][1] + o[1][0]).abs().max(2.0 * o[0][0].abs()).max(2.0 * o[1][1].abs())
            })
            .fold(0.0, f64::max)
    }

    /// Max over the nodes of both rows of `(-Δ)^{1/4}U - ΩU - Ω₁U`.
    pub fn system_defect(&self, u: &Field, v: &Field) -> f64 {
        (0..u.n_points())
            .map(|j| {
                let uu = [u.value(j, 0), v.value(j, 0)];
                let (o, o1) = (self.big_omega(j), self.big_omega1(j));
                let rhs = |r: usize| (o[r][0] + o1[r][0]) * uu[0] + (o[r][1] + o1[r][1]) * uu[1];
                (self.lu.value(j, 0) - rhs(0)).abs().max((self.lv.value(j, 0) - rhs(1)).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Potentials from sampled profiles, with `(-Δ)^{1/4}` by the quadrature route.
pub fn build_potentials(u: &Field, v: &Field) -> Result<Potentials> {
    u.check_compatible(v)?;
    if u.components() != 1 {
        return Err(Error::ShapeMismatch("profiles must be scalar".into()));
    }
    if u.samples().iter().chain(v.samples()).any(|x| *x <= 0.0) {
        return invalid("profiles must be positive for the potentials to exist");
    }
    let lu = frac_laplacian_line_quadrature(u, FracExponent::QUARTER, Convention::Paper)?;
    let lv = frac_laplacian_line_quadrature(v, FracExponent::QUARTER, Convention::Paper)?;
    let omega: Vec<f64> = lu.samples().iter().zip(v.samples()).map(|(a, b)| a / b).collect();
    let omega1: Vec<f64> =
        (0..u.n_points()).map(|j| (lv.samples()[j] + omega[j] * u.samples()[j]) / u.samples()[j]).collect();
    Ok(Potentials { omega: Field::new(*u.grid(), 1, omega)?, omega1: Field::new(*u.grid(), 1, omega1)?, lu, lv })
}

/// `c_n = 1/‖u(n·)‖_{L²[-1,1]} = (n / (2 + 2 ln n))^{1/2}` for the piecewise `u`.
pub fn c_n_numeric(n: f64) -> f64 {
    (n / (2.0 + 2.0 * n.ln())).sqrt()
}

/// Closed form `(n / ln((n + √(1+n²))/(-n + √(1+n²))))^{1/2}`, written as
/// `(n / (2 asinh n))^{1/2}` to avoid cancellation.
pub fn c_n_closed_form(n: f64) -> f64 {
    (n / (2.0 * n.asinh())).sqrt()
}

/// `‖u(n·)‖²_{L²[-1,1]}` and `‖v(n·)‖²_{L²[-1,1]}` by quadrature.
pub fn scaled_profile_norms(n: f64) -> (f64, f64) {
    let opts = QuadOptions::default();
    let mut breaks = vec![1.0];
    let mut b = 2.0;
    while b < n {
        breaks.push(b);
        b *= 2.0;
    }
    let uu = integrate_with_breaks(|s| u_profile(s).powi(2), 0.0, n, &breaks, opts).value;
    let vv = integrate_with_breaks(|s| v_profile(s).powi(2), 0.0, n, &breaks, opts).value;
    (2.0 * uu / n, 2.0 * vv / n)
}

/// `‖U_n‖_{L²[-1,1]}` with `c_n` from quadrature.
pub fn window_l2(n: f64) -> f64 {
    let (uu, vv) = scaled_profile_norms(n);
    ((uu + vv) / uu).sqrt()
}

/// Log-log slopes of `|(-Δ)^{1/4}u|`, `|(-Δ)^{1/4}v|` and `|ω|` on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySlopes {
    pub lo: f64,
    pub hi: f64,
    pub u: f64,
    pub v: f64,
    pub omega: f64,
}

pub fn decay_slopes(lo: f64, hi: f64, samples: usize) -> Result<DecaySlopes> {
    if !(lo > 1.0 && hi > lo) || samples < 2 {
        return invalid(format!("decay window must satisfy 1 < lo < hi, got [{lo}, {hi}]"));
    }
    let ts: Vec<f64> = (0..samples).map(|k| lo * (hi / lo).powf(k as f64 / (samples - 1) as f64)).collect();
    let vals: Vec<(f64, f64)> = ts.par_iter().map(|&t| (lu_point(t), lv_point(t))).collect();
    let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let slope = |f: &dyn Fn(usize) -> f64| -> Result<f64> {
        let ly: Vec<f64> = (0..samples).map(|k| f(k).abs().ln()).collect();
        Ok(linear_fit(&lt, &ly)?.slope)
    };
    Ok(DecaySlopes {
        lo,
        hi,
        u: slope(&|k| vals[k].0)?,
        v: slope(&|k| vals[k].1)?,
        omega: slope(&|k| vals[k].0 / v_profile(ts[k]))?,
    })
}

/// `U_n`, `Ω_n` and `Ω₁_n` sampled on a grid, from the profile formulas at `n t`.
#[derive(Debug, Clone)]
pub struct ScaledSequence {
    pub n: f64,
    pub c_n_numeric: f64,
    pub c_n_closed_form: f64,
    /// Two components `c_n (u(n t), v(n t))`.
    pub u_n: Field,
    /// The entry `√n ω(n t)` of `Ω_n`.
    pub omega_n: Field,
    /// The entry `√n ω₁(n t)` of `Ω₁_n`.
    pub omega1_n: Field,
    /// `(-Δ)^{1/4} U_n` through `n^{1/2} ((-Δ)^{1/4} U)(n t)`.
    pub lap_u_n: Field,
}

impl ScaledSequence {
    /// Max over nodes of `|(-Δ)^{1/4}U_n - Ω_n U_n - Ω₁_n U_n|`.
    pub fn system_defect(&self) -> f64 {
        (0..self.u_n.n_points())
            .map(|j| {
                let (a, b) = (self.u_n.value(j, 0), self.u_n.value(j, 1));
                let w = self.omega_n.value(j, 0);
                let w1 = self.omega1_n.value(j, 0);
                let r0 = self.lap_u_n.value(j, 0) - w * b;
                let r1 = self.lap_u_n.value(j, 1) - (-w * a + w1 * a);
                r0.abs().max(r1.abs())
            })
            .fold(0.0, f64::max)
    }

    /// `max |U_n(t) - U_n(-t)|`.
    pub fn evenness_defect(&self) -> f64 {
        let g = self.u_n.grid();
        (0..self.u_n.n_points())
            .flat_map(|j| (0..2).map(move |c| (j, c)))
            .map(|(j, c)| (self.u_n.value(j, c) - self.u_n.value(g.reflect(j), c)).abs())
            .fold(0.0, f64::max)
    }
}

pub fn scaled_sequence(n: f64, grid: &LineGrid) -> Result<ScaledSequence> {
    if !(n >= 2.0) {
        return invalid(format!("scaled sequence needs n ≥ 2, got {n}"));
    }
    if grid.spacing() > 0.25 / n {
        return Err(Error::UnderResolved(format!(
            "spacing {} does not resolve the plateau of width {} (need ≤ {})",
            grid.spacing(),
            2.0 / n,
            0.25 / n
        )));
    }
    let cn = c_n_numeric(n);
    let sn = n.sqrt();
    let g = Grid::Line(*grid);
    let nodes = grid.nodes();
    let point: Vec<[f64; 4]> = nodes
        .par_iter()
        .map(|&t| {
            let s = n * t;
            let (lu, lv) = (lu_point(s), lv_point(s));
            let w = lu / v_profile(s);
            let w1 = (lv + w * u_profile(s)) / u_profile(s);
            [cn * sn * lu, cn * sn * lv, sn * w, sn * w1]
        })
        .collect();
    let u_n = Field::from_fn_vec(g, 2, |t| vec![cn * u_profile(n * t), cn * v_profile(n * t)])?.with_tails(vec![
        TailModel::decaying(0.5, cn / sn, cn / sn),
        TailModel::decaying(0.75, cn * n.powf(-0.75), cn * n.powf(-0.75)),
    ])?;
    let col = |k: usize| point.iter().map(|p| p[k]).collect::<Vec<_>>();
    Ok(ScaledSequence {
        n,
        c_n_numeric: cn,
        c_n_closed_form: c_n_closed_form(n),
        u_n,
        omega_n: Field::new(g, 1, col(2))?,
        omega1_n: Field::new(g, 1, col(3))?,
        lap_u_n: Field::from_components(g, &[col(0), col(1)])?,
    })
}

/// Diagnostics of one `(n, R)` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub n: f64,
    pub big_r: f64,
    pub c_n_numeric: f64,
    pub c_n_closed_form: f64,
    pub u_n_window_l2: f64,
    /// `‖Ω_n‖_{L²(R/n < |t| < 1/R)}` with the operator norm of `Ω_n`.
    pub neck_l2_omega: f64,
    /// `‖ω‖_{L²(R < |s| < n/R)}`, equal to the above by the substitution `s = n t`.
    pub neck_l2_omega_unscaled: f64,
    pub neck_l21_omega1: f64,
    pub decay_slope_u: f64,
    pub decay_slope_v: f64,
    /// `‖(-Δ)^{1/4}U_n - Ω_n U_n - Ω₁_n U_n‖_{L²[-1,1]}`.
    pub system_residual: f64,
}

/// Geometric cells on `[lo, hi]`: `(midpoint, width)`.
fn log_cells(lo: f64, hi: f64, per_decade: usize) -> Vec<(f64, f64)> {
    let k = ((hi / lo).log10() * per_decade as f64).ceil().max(1.0) as usize;
    let q = (hi / lo).powf(1.0 / k as f64);
    (0..k)
        .map(|i| {
            let a = lo * q.powi(i as i32);
            let b = if i + 1 == k { hi } else { a * q };
            ((a * b).sqrt(), b - a)
        })
        .collect()
}

const CELLS_PER_DECADE: usize = 64;

/// Neck norms on `B(0, 1/R) ∖ B(0, R/n)` and the system residual on `[-1, 1]`.
/// `slopes` are copied into the report.
pub fn neck_report(n: f64, big_r: f64, slopes: &DecaySlopes) -> Result<CounterexampleReport> {
    if !(big_r >= 2.0) || !(big_r / n < 1.0 / big_r) {
        return invalid(format!("degenerate neck: R = {big_r}, n = {n} (need R ≥ 2 and R/n < 1/R)"));
    }
    let cn = c_n_numeric(n);
    let sn = n.sqrt();
    // Cells in s = n t on R < s < n/R; both signs by symmetry.
    let cells = log_cells(big_r, n / big_r, CELLS_PER_DECADE);
    let vals: Vec<(f64, f64)> = cells.par_iter().map(|&(s, _)| (omega_point(s), omega1_point(s))).collect();
    let ws: Vec<f64> = cells.iter().map(|c| 2.0 * c.1).collect();
    let wt: Vec<f64> = ws.iter().map(|w| w / n).collect();
    let om: Vec<f64> = vals.iter().map(|v| v.0).collect();
    let om_t: Vec<f64> = om.iter().map(|w| sn * w).collect();
    let om1_t: Vec<f64> = vals.iter().map(|v| sn * v.1).collect();
    let neck_l2_omega = lp_weighted(&om_t, &wt, 2.0)?;
    let neck_l2_omega_unscaled = lp_weighted(&om, &ws, 2.0)?;
    let neck_l21_omega1 = lorentz_weighted(&om1_t, &wt).0;

    // Residual on [-1, 1], with (-Δ)^{1/4} U_n through homogeneity.
    let mut rc = vec![(0.5e-3 / n, 1e-3 / n)];
    rc.extend(log_cells(1e-3 / n, 1.0, 16));
    let res: Vec<f64> = rc
        .par_iter()
        .map(|&(t, _)| {
            let s = n * t;
            let (lu, lv) = (lu_point(s), lv_point(s));
            let (u, v) = (u_profile(s), v_profile(s));
            let w = lu / v;
            let w1 = (lv + w * u) / u;
            let r0 = cn * sn * lu - sn * w * cn * v;
            let r1 = cn * sn * lv - (-sn * w + sn * w1) * cn * u;
            r0.hypot(r1)
        })
        .collect();
    let rw: Vec<f64> = rc.iter().map(|c| 2.0 * c.1).collect();
    Ok(CounterexampleReport {
        n,
        big_r,
        c_n_numeric: cn,
        c_n_closed_form: c_n_closed_form(n),
        u_n_window_l2: window_l2(n),
        neck_l2_omega,
        neck_l2_omega_unscaled,
        neck_l21_omega1,
        decay_slope_u: slopes.u,
        decay_slope_v: slopes.v,
        system_residual: lp_weighted(&res, &rw, 2.0)?,
    })
}

/// All `(n, R)` pairs, skipping degenerate ones.
pub fn sweep(ns: &[f64], rs: &[f64]) -> Result<Vec<CounterexampleReport>> {
    let slopes = decay_slopes(10.0, 1e3, 41)?;
    let pairs: Vec<(f64, f64)> = ns
        .iter()
        .flat_map(|&n| rs.iter().map(move |&r| (n, r)))
        .filter(|(n, r)| *r >= 2.0 && r / n < 1.0 / r)
        .collect();
    pairs.par_iter().map(|&(n, r)| neck_report(n, r, &slopes)).collect()
}

/// Log-log slope of the neck `L²` norm of `Ω_n` against `R` for fixed `n`.
pub fn neck_slope(reports: &[CounterexampleReport]) -> Result<f64> {
    let x: Vec<f64> = reports.iter().map(|r| r.big_r.ln()).collect();
    let y: Vec<f64> = reports.iter().map(|r| r.neck_l2_omega.ln()).collect();
    Ok(linear_fit(&x, &y)?.slope)
}

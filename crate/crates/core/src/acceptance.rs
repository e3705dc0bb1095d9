//! End-to-end acceptance checks, numbered 1 to 15. Each criterion is a list of
//! measured quantities with their bounds; informational entries are reported
//! but do not decide the outcome.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::commutators::{op_f, op_lambda, op_s, op_t};
use crate::counterexample::{
    build_potentials, build_profiles, decay_slopes, neck_report, neck_slope, scaled_sequence, window_l2,
};
use crate::error::Result;
use crate::fracops::{frac_laplacian, frac_laplacian_line_quadrature, poisson_kernel_line, Convention};
use crate::geometry::{even_part, odd_part, Field, FracExponent, Grid, LineGrid, TailModel};
use crate::halfharmonic::{
    bubbling_experiment, el_residual, energy, energy_directional_derivative, gradient_flow, identity_map, max_norm,
    mobius_compose, perturbed_identity, BubbleOptions, FlowOptions, PlaneDistribution, SphereDistribution,
};
use crate::norms::{lorentz_21, lorentz_2inf, lp_norm, Region};
use crate::pohozaev::{
    even_subspace_matrix, inverse_stereographic_field, kernel_transform_check, m_adjoint_check, m_minus, m_plus,
    relative, residual_circle, residual_line, residual_plane, PlaneField,
};
use crate::spectral;
use crate::stereo::transfer_identity_check;

/// One measured quantity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable bound, e.g. `≤ 1e-12`.
    pub bound: String,
    pub passed: bool,
    /// Informational entries do not affect the criterion.
    pub gating: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {status} {} ({:.1}s)", self.id, self.title, self.seconds)?;
        if let Some(e) = &self.error {
            write!(f, ": error: {e}")?;
        }
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| c.gating && !c.passed)
            .map(|c| format!("{} = {:.6e} (want {})", c.name, c.value, c.bound))
            .collect();
        if !failed.is_empty() {
            write!(f, ": {}", failed.join("; "))?;
        }
        Ok(())
    }
}

/// Builder for a list of checks.
#[derive(Debug, Default)]
pub struct Checks(pub Vec<Check>);

impl Checks {
    pub fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            bound: format!("≤ {bound:e}"),
            passed: value <= bound,
            gating: true,
        });
    }

    pub fn within(&mut self, name: impl Into<String>, value: f64, lo: f64, hi: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            bound: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
            gating: true,
        });
    }

    pub fn holds(&mut self, name: impl Into<String>, value: f64, ok: bool, bound: impl Into<String>) {
        self.0.push(Check { name: name.into(), value, bound: bound.into(), passed: ok, gating: true });
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64) {
        self.0.push(Check { name: name.into(), value, bound: "reported".into(), passed: true, gating: false });
    }

    pub fn all_passed(&self) -> bool {
        self.0.iter().all(|c| !c.gating || c.passed)
    }
}

pub const TITLES: [&str; 15] = [
    "circle multiplier exactness",
    "Poisson kernel identities",
    "line half-Laplacian closed form",
    "kernel transform identities",
    "Pohozaev identity on the line",
    "Pohozaev identity on the circle",
    "Pohozaev identity in the plane",
    "stereographic transfer identity",
    "commutator degeneracy and oracles",
    "half-harmonic flow",
    "Möbius invariance",
    "bubbling measurement",
    "non-quantization example",
    "Lorentz norms",
    "M± operators",
];

/// Runs one criterion; errors are turned into a failed result.
pub fn run_criterion(id: u8) -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::default();
    let outcome = match id {
        1 => c1(&mut c),
        2 => c2(&mut c),
        3 => c3(&mut c),
        4 => c4(&mut c),
        5 => c5(&mut c),
        6 => c6(&mut c),
        7 => c7(&mut c),
        8 => c8(&mut c),
        9 => c9(&mut c),
        10 => c10(&mut c),
        11 => c11(&mut c),
        12 => c12(&mut c),
        13 => c13(&mut c),
        14 => c14(&mut c),
        15 => c15(&mut c),
        _ => Err(crate::Error::InvalidArgument(format!("no criterion {id}"))),
    };
    let error = outcome.err().map(|e| e.to_string());
    let passed = error.is_none() && c.all_passed();
    CriterionResult {
        id,
        title: TITLES.get(id.wrapping_sub(1) as usize).copied().unwrap_or("unknown").to_string(),
        passed,
        checks: c.0,
        error,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=15).map(run_criterion).collect()
}

fn circle_map(n: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Field> {
    Field::from_fn_vec(Grid::circle(n)?, 2, f)
}

fn max_diff(f: &Field, exact: impl Fn(f64) -> f64, keep: impl Fn(f64) -> bool) -> f64 {
    let g = f.grid();
    (0..f.n_points()).filter(|&j| keep(g.node(j))).map(|j| (f.value(j, 0) - exact(g.node(j))).abs()).fold(0.0, f64::max)
}

fn c1(c: &mut Checks) -> Result<()> {
    let g = Grid::circle(4096)?;
    let mut worst: f64 = 0.0;
    for k in 1..=32 {
        let kf = k as f64;
        let f = Field::from_fn(g, |t| (kf * t).cos())?;
        let l = frac_laplacian(&f, FracExponent::HALF)?;
        worst = worst.max(max_diff(&l, |t| kf * (kf * t).cos(), |_| true) / kf);
    }
    c.at_most("max relative error, k = 1..32", worst, 1e-12);
    Ok(())
}

fn c2(c: &mut Checks) -> Result<()> {
    c.at_most("|G(1,0) - 1/π|", (poisson_kernel_line(1.0, 0.0)?.value - 1.0 / PI).abs(), 1e-15);
    let g = LineGrid::new(1e3, 1 << 16)?;
    let window: f64 =
        g.nodes().iter().map(|&x| poisson_kernel_line(1.0, x).map(|k| k.value)).sum::<Result<f64>>()? * g.spacing();
    let tail = 2.0 * (0.5 - (1e3f64).atan() / PI);
    c.at_most("|∫G(1,·) - 1|", (window + tail - 1.0).abs(), 1e-9);

    let lg = LineGrid::default();
    let grid = Grid::Line(lg);
    let (t, s) = (0.7, 1.3);
    let gt = Field::from_fn(grid, |x| poisson_kernel_line(t, x).map(|k| k.value).unwrap_or(f64::NAN))?;
    let gs = Field::from_fn(grid, |x| poisson_kernel_line(s, x).map(|k| k.value).unwrap_or(f64::NAN))?;
    let two_l = 2.0 * lg.half_width();
    let prod: Vec<Complex64> = gt.spectrum(0).iter().zip(gs.spectrum(0)).map(|(a, b)| a * b * two_l).collect();
    let conv = spectral::inverse_real(&prod);
    let h = lg.spacing();
    let mut err: f64 = 0.0;
    for (j, v) in conv.iter().enumerate() {
        // Circular convolution of cell-centred samples lands on shifted nodes.
        let x = -two_l + (j as f64 + 1.0) * h;
        let x = if x < -two_l / 2.0 { x + two_l } else { x };
        if x.abs() <= 10.0 {
            err = err.max((v - poisson_kernel_line(t + s, x)?.value).abs());
        }
    }
    c.at_most("semigroup G(0.7)*G(1.3) - G(2), |x| ≤ 10", err, 1e-6);
    Ok(())
}

fn c3(c: &mut Checks) -> Result<()> {
    let exact = |x: f64| (1.0 - x * x) / (1.0 + x * x).powi(2);
    let f = |g: LineGrid| -> Result<Field> {
        Ok(Field::from_fn(Grid::Line(g), |x| 1.0 / (1.0 + x * x))?.with_tail(TailModel::symmetric(2.0, 1.0)))
    };
    let spec = frac_laplacian(&f(LineGrid::default())?, FracExponent::HALF)?;
    c.at_most("spectral max error, |x| ≤ 10", max_diff(&spec, exact, |x| x.abs() <= 10.0), 1e-6);
    let quad = frac_laplacian_line_quadrature(
        &f(LineGrid::new(200.0, 1 << 14)?)?,
        FracExponent::HALF,
        Convention::Normalized,
    )?;
    c.at_most("quadrature max error, |x| ≤ 10", max_diff(&quad, exact, |x| x.abs() <= 10.0), 1e-3);
    Ok(())
}

fn c4(c: &mut Checks) -> Result<()> {
    let r = kernel_transform_check(&LineGrid::default(), 10.0)?;
    c.at_most("(-Δ)^{-1/4} kernel⁺ vs reference closed form", r.plus_vs_kernel, 1e-3);
    c.at_most("(-Δ)^{-1/4} kernel⁻ vs reference closed form", r.minus_vs_kernel, 1e-3);
    c.info("(-Δ)^{-1/4} kernel⁺ vs -(√π/2) Re(1+ix)^{-3/2}", r.plus_vs_exact);
    c.info("(-Δ)^{-1/4} kernel⁻ vs -(√π/2) Im(1+ix)^{-3/2}", r.minus_vs_exact);
    Ok(())
}

fn c5(c: &mut Checks) -> Result<()> {
    let u = inverse_stereographic_field(Grid::Line(LineGrid::default()))?;
    let ts = [0.5, 1.0, 2.0, 5.0];
    let r = residual_line(&u, &ts)?;
    for (k, &t) in ts.iter().enumerate() {
        let exact = 4.0 * PI * PI / (t + 1.0).powi(4);
        c.at_most(format!("lhs relative error, t = {t}"), relative(r.lhs[k], exact), 1e-3);
        c.at_most(format!("rhs relative error, t = {t}"), relative(r.rhs[k], exact), 1e-3);
    }
    c.info("lhs at t = 1", r.lhs[1]);
    c.info("hypothesis residual", r.hypothesis_residual);
    Ok(())
}

fn c6(c: &mut Checks) -> Result<()> {
    let id = identity_map(256)?;
    let r = residual_circle(&id)?;
    let m = &r.modes;
    let dev = (m.u1[0] - 0.5).abs().max(m.u1[1].abs()).max(m.u_minus1[0].abs()).max((m.u_minus1[1] - 0.5).abs());
    c.at_most("identity: |u₁ - (1/2, 0)|, |u₋₁ - (0, 1/2)|", dev, 1e-10);
    c.at_most("identity: ||u₁| - |u₋₁||", m.norm_gap, 1e-10);
    c.at_most("identity: |u₁·u₋₁|", m.dot, 1e-10);
    for a in [0.3, 0.6, 0.9] {
        let r = residual_circle(&mobius_compose(&id, a)?)?;
        c.at_most(format!("u∘φ_a, a = {a}: ||u₁| - |u₋₁||"), r.modes.norm_gap, 1e-10);
        c.at_most(format!("u∘φ_a, a = {a}: |u₁·u₋₁|"), r.modes.dot, 1e-10);
    }
    Ok(())
}

fn c7(c: &mut Checks) -> Result<()> {
    let id = PlaneField::from_fn(8.0, 512, 2, |x, y| vec![x, y])?;
    c.at_most("identity relative residual", residual_plane(&id, (0.0, 0.0), &[1.0])?.max_relative_residual(), 1e-4);
    let z2 = PlaneField::from_fn(8.0, 512, 2, |x, y| vec![x * x - y * y, 2.0 * x * y])?;
    c.at_most(
        "(Re z², Im z²) relative residual",
        residual_plane(&z2, (0.0, 0.0), &[1.0])?.max_relative_residual(),
        1e-4,
    );
    Ok(())
}

fn c8(c: &mut Checks) -> Result<()> {
    let lg = Grid::Line(LineGrid::default());
    let circle = Grid::circle(1024)?;
    let u = Field::from_fn(lg, |x| 1.0 / (1.0 + x * x))?.with_tail(TailModel::symmetric(2.0, 1.0));
    let r = transfer_identity_check(&u, &circle, 0.2)?;
    c.at_most("closed form 1/(1+x²): max discrepancy", r.max_abs_discrepancy, 1e-6);
    let lhs_err = r.theta.iter().zip(&r.lhs).map(|(t, l)| (l - 0.5 * t.sin()).abs()).fold(0.0, f64::max);
    c.at_most("closed form: circle side vs sin θ / 2", lhs_err, 1e-6);

    let smooth = |x: f64| 0.7 * x / (1.0 + x * x) - 0.4 / (1.0 + (x - 1.3).powi(2)) + 0.25 * (-(x + 0.6).powi(2)).exp();
    let u = Field::from_fn(lg, smooth)?.with_tail(TailModel::decaying(1.0, -0.7, 0.7));
    let r = transfer_identity_check(&u, &circle, 0.2)?;
    c.at_most("smooth field: two-route max discrepancy", r.max_abs_discrepancy, 1e-3);
    Ok(())
}

fn c9(c: &mut Checks) -> Result<()> {
    let n = 256;
    let g = Grid::circle(n)?;
    let f = |h: fn(f64) -> f64| Field::from_fn(g, h);
    let v = f(|t| (3.0 * t).sin() + 0.5 * (5.0 * t).cos() - 0.2 * t.cos())?;
    let konst = f(|_| 2.5)?;
    c.at_most("T(const, v)", op_t(&konst, &v)?.max_abs(), 1e-12);
    c.at_most("Λ(const, mean-zero v)", op_lambda(&konst, &v)?.max_abs(), 1e-12);

    let cos = f(f64::cos)?;
    let sin = f(f64::sin)?;
    let sin2 = f(|t| (2.0 * t).sin())?;
    let r3 = 3f64.sqrt();
    let r2 = 2f64.sqrt();
    c.at_most(
        "T(cos θ, cos θ) vs (√2/2) cos 2θ",
        max_diff(&op_t(&cos, &cos)?, |t| 0.5 * r2 * (2.0 * t).cos(), |_| true),
        1e-10,
    );
    c.at_most(
        "S(cos θ, sin 2θ) vs coefficient oracle",
        max_diff(&op_s(&cos, &sin2)?, |t| (0.5 * r3 + 0.5 * r2 - 0.5) * (3.0 * t).sin() + 0.5 * r2 * t.sin(), |_| true),
        1e-10,
    );
    c.at_most("F(cos θ, cos θ) vs -cos 2θ", max_diff(&op_f(&cos, &cos)?, |t| -(2.0 * t).cos(), |_| true), 1e-10);
    c.at_most("Λ(cos θ, sin θ) vs 0", op_lambda(&cos, &sin)?.max_abs(), 1e-10);
    Ok(())
}

fn c10(c: &mut Checks) -> Result<()> {
    let s = SphereDistribution::new(2)?;
    let u0 = perturbed_identity(128, 0.05)?;
    let run = gradient_flow(&u0, &s, &FlowOptions::default())?;
    c.at_most("|E - 2π|", (run.state.energy - 2.0 * PI).abs(), 1e-4);
    c.at_most("EL residual", run.state.el_residual_norm, 1e-6);
    c.at_most("energy increases along accepted steps", run.monotonicity_violations as f64, 0.0);
    c.info("iterations", run.state.iteration as f64);

    let w = circle_map(128, |t| {
        let psi = (3.0 * t).sin() + 0.3 * (5.0 * t).cos();
        vec![-psi * t.sin(), psi * t.cos()]
    })?;
    // Tangential part of `w` at `u0`.
    let wt: Vec<f64> = (0..128)
        .flat_map(|j| {
            let p = s.tangent_projector(u0.row(j));
            let out = p * nalgebra::DVector::from_column_slice(w.row(j));
            vec![out[0], out[1]]
        })
        .collect();
    let w = Field::new(*u0.grid(), 2, wt)?;
    let eps = 1e-5;
    let retract = |f: Field| -> Result<Field> {
        let samples: Vec<f64> = (0..f.n_points())
            .flat_map(|j| {
                let r = f.row(j);
                let n = r[0].hypot(r[1]);
                vec![r[0] / n, r[1] / n]
            })
            .collect();
        Field::new(*f.grid(), 2, samples)
    };
    let ep = energy(&retract(u0.linear_combination(1.0, &w, eps)?)?)?;
    let em = energy(&retract(u0.linear_combination(1.0, &w, -eps)?)?)?;
    let exact = energy_directional_derivative(&u0, &w)?;
    c.at_most("gradient vs central difference (relative)", ((ep - em) / (2.0 * eps) - exact).abs() / exact.abs(), 1e-5);
    Ok(())
}

fn c11(c: &mut Checks) -> Result<()> {
    let s = SphereDistribution::new(2)?;
    let id = identity_map(64)?;
    let e = energy(&id)?;
    for a in [0.3, 0.6, 0.9] {
        let v = mobius_compose(&id, a)?;
        c.at_most(format!("a = {a}: |E(u∘φ_a) - E(u)|/E(u)"), ((energy(&v)? - e) / e).abs(), 1e-6);
        c.at_most(format!("a = {a}: EL residual of u∘φ_a"), max_norm(&el_residual(&v, &s)?), 1e-6);
    }
    Ok(())
}

fn c12(c: &mut Checks) -> Result<()> {
    let id = identity_map(64)?;
    let a_values: Vec<f64> = (1..=4).map(|k| 1.0 - 10f64.powi(-k)).collect();
    let reports = bubbling_experiment(&id, &a_values, &BubbleOptions::default())?;
    for neck in [2.0, 4.0, 8.0] {
        let row: Vec<_> = reports.iter().filter(|r| r.neck == neck).collect();
        let sups: Vec<f64> = row.iter().map(|r| r.dyadic_sup).collect();
        let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
        let worst_step = sups.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        if neck == 2.0 {
            c.holds(format!("Λ = {neck}: dyadic sup decreasing in k (max ratio)"), worst_step, decreasing, "< 1");
        } else {
            c.info(format!("Λ = {neck}: max ratio of consecutive dyadic sups"), worst_step);
        }
        for r in &row {
            c.info(format!("Λ = {neck}, a = {}: dyadic sup", r.a), r.dyadic_sup);
            match (&r.fit, neck == 2.0) {
                (Some(fit), true) => {
                    c.within(format!("Λ = {neck}, a = {}: fitted neck exponent", r.a), fit.exponent, 0.35, 0.65)
                }
                (Some(fit), false) => c.info(format!("Λ = {neck}, a = {}: fitted neck exponent", r.a), fit.exponent),
                (None, _) => c.info(format!("Λ = {neck}, a = {}: fit rejected by the gate", r.a), 0.0),
            }
        }
    }
    Ok(())
}

fn c13(c: &mut Checks) -> Result<()> {
    let slopes = decay_slopes(10.0, 1e3, 41)?;
    c.within("decay slope of (-Δ)^{1/4}u on [10, 10³]", slopes.u, -1.55, -1.45);
    c.within("decay slope of (-Δ)^{1/4}v on [10, 10³]", slopes.v, -1.30, -1.20);
    for n in [1e2, 1e4, 1e6] {
        c.within(format!("‖U_n‖ on [-1, 1], n = {n:e}"), window_l2(n), 1.0, 1.3);
    }
    let reports: Vec<_> =
        [4.0, 16.0, 64.0, 256.0].iter().map(|&r| neck_report(1e6, r, &slopes)).collect::<Result<_>>()?;
    c.within("neck L² of Ω_n vs R, log-log slope at n = 10⁶", neck_slope(&reports)?, -0.35, -0.15);
    let cov = reports
        .iter()
        .map(|r| (r.neck_l2_omega - r.neck_l2_omega_unscaled).abs() / r.neck_l2_omega)
        .fold(0.0, f64::max);
    c.at_most("change of variables t = s/n (relative)", cov, 1e-10);
    c.info("max system residual on [-1, 1]", reports.iter().map(|r| r.system_residual).fold(0.0, f64::max));

    let (u, v) = build_profiles(&LineGrid::new(200.0, 1 << 13)?)?;
    c.at_most("max |Ω + Ωᵀ|", build_potentials(&u, &v)?.antisymmetry_defect(), 0.0);
    let seq = scaled_sequence(100.0, &LineGrid::new(1.0, 1024)?)?;
    c.at_most("U_n evenness, n = 100", seq.evenness_defect(), 1e-12);
    Ok(())
}

fn c14(c: &mut Checks) -> Result<()> {
    let g = LineGrid::new(8.0, 1 << 12)?;
    let h = g.spacing();
    let ell: f64 = 1.0;
    let ind = Field::from_fn(Grid::Line(g), |x| if x.abs() < ell / 2.0 { 1.0 } else { 0.0 })?;
    let region = Region::All;
    c.at_most("indicator: |L^{2,1} - ℓ^{1/2}|", (lorentz_21(&ind, &region)? - ell.sqrt()).abs(), h.sqrt());
    c.at_most("indicator: |L^{2,∞} - ℓ^{1/2}|", (lorentz_2inf(&ind, &region)? - ell.sqrt()).abs(), h.sqrt());

    let lg = LineGrid::new(1024.0, 1 << 18)?;
    let f = Field::from_fn(Grid::Line(lg), |x| x.abs().powf(-0.5))?;
    let mut weak = Vec::new();
    for ratio in [10.0, 100.0, 1000.0] {
        let region = Region::annulus(0.0, 1.0, ratio)?;
        let l2 = lp_norm(&f, 2.0, &region)?;
        let exact = (2.0 * f64::ln(ratio)).sqrt();
        c.at_most(format!("R/r = {ratio}: L² vs (2 log(R/r))^{{1/2}} (relative)"), (l2 - exact).abs() / exact, 0.05);
        weak.push(lorentz_2inf(&f, &region)?);
    }
    let hi = weak.iter().copied().fold(f64::MIN, f64::max);
    let lo = weak.iter().copied().fold(f64::MAX, f64::min);
    c.at_most("L^{2,∞} spread over R/r ∈ {10, 10², 10³} (relative)", (hi - lo) / hi, 0.05);
    for (w, ratio) in weak.iter().zip([10.0, 100.0, 1000.0]) {
        c.info(format!("R/r = {ratio}: L^{{2,∞}}"), *w);
    }
    Ok(())
}

fn c15(c: &mut Checks) -> Result<()> {
    let g = LineGrid::new(20.0, 2048)?;
    let lg = Grid::Line(g);
    let even = Field::from_fn(lg, |x| (-x * x).exp())?.with_tail(TailModel::zero());
    let odd = Field::from_fn(lg, |x| x * (-x * x).exp())?.with_tail(TailModel::zero());
    let mp = m_plus(&even, &g)?;
    c.at_most("M⁺[even]: odd part / max", odd_part(&mp).max_abs() / mp.max_abs(), 1e-12);
    let mm = m_minus(&odd, &g)?;
    c.at_most("M⁻[odd]: even part / max", even_part(&mm).max_abs() / mm.max_abs(), 1e-12);

    let ag = LineGrid::new(12.0, 1024)?;
    let w1 = Field::from_fn(Grid::Line(ag), |x| (-x * x).exp())?.with_tail(TailModel::zero());
    let w2 = Field::from_fn(Grid::Line(ag), |x| (1.0 + x * x) * (-0.5 * x * x).exp())?.with_tail(TailModel::zero());
    c.at_most("adjoint pairing, two routes (relative)", m_adjoint_check(&w1, &w2, &ag)?.relative, 1e-3);

    let s = even_subspace_matrix(64)?;
    c.holds("even-subspace matrix: smallest singular value", s.sigma_min, s.sigma_min > 0.0, "> 0");
    c.info("even-subspace matrix: condition number", s.condition);
    Ok(())
}

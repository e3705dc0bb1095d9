//! Half-harmonic maps: the fractional Dirichlet energy, Euler–Lagrange and
//! horizontality residuals, a projected gradient flow, Möbius compositions and
//! the bubbling experiment.

mod bubble;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fracops::{derivative, frac_laplacian};
use crate::geometry::{Field, FracExponent, Grid};
use crate::norms::sobolev_half_seminorm;

pub use bubble::{bubbling_experiment, BubbleOptions, NeckReport};

/// A field of orthogonal projectors `P_T(z)` onto an `r`-plane in `ℝ^m`.
pub trait PlaneDistribution: Sync {
    fn dim(&self) -> usize;

    /// `P_T(z)`, symmetric and idempotent.
    fn tangent_projector(&self, z: &[f64]) -> DMatrix<f64>;

    fn normal_projector(&self, z: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim()) - self.tangent_projector(z)
    }

    fn lipschitz_bound(&self) -> f64;

    /// Distance of `z` from the target submanifold, when there is one.
    fn target_defect(&self, _z: &[f64]) -> Option<f64> {
        None
    }

    /// Nearest-point retraction onto the target, when one is available.
    fn retract(&self, _z: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// Tangent planes of the unit sphere `S^{m-1} ⊂ ℝ^m`: `P_N(z) = zzᵀ/|z|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereDistribution {
    pub m: usize,
}

impl SphereDistribution {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return invalid(format!("sphere target needs m ≥ 2, got {m}"));
        }
        Ok(Self { m })
    }
}

impl PlaneDistribution for SphereDistribution {
    fn dim(&self) -> usize {
        self.m
    }

    fn tangent_projector(&self, z: &[f64]) -> DMatrix<f64> {
        self.normal_projector(z).map(|v| -v) + DMatrix::identity(self.m, self.m)
    }

    fn normal_projector(&self, z: &[f64]) -> DMatrix<f64> {
        let v = DVector::from_column_slice(z);
        let n2 = v.norm_squared();
        if n2 == 0.0 {
            return DMatrix::zeros(self.m, self.m);
        }
        &v * v.transpose() / n2
    }

    fn lipschitz_bound(&self) -> f64 {
        2.0
    }

    fn target_defect(&self, z: &[f64]) -> Option<f64> {
        Some((z.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs())
    }

    fn retract(&self, z: &[f64]) -> Option<Vec<f64>> {
        let n = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        (n > 0.0).then(|| z.iter().map(|v| v / n).collect())
    }
}

/// The contact planes `ker(dz₃ - z₂ dz₁)` in `ℝ³`, a non-integrable
/// distribution with no target submanifold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactDistribution;

impl PlaneDistribution for ContactDistribution {
    fn dim(&self) -> usize {
        3
    }

    fn tangent_projector(&self, z: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(3, 3) - self.normal_projector(z)
    }

    fn normal_projector(&self, z: &[f64]) -> DMatrix<f64> {
        let n = DVector::from_column_slice(&[-z[1], 0.0, 1.0]);
        &n * n.transpose() / n.norm_squared()
    }

    fn lipschitz_bound(&self) -> f64 {
        2.0
    }
}

/// `E(u) = ∫ |(-Δ)^{1/4} u|²`.
pub fn energy(u: &Field) -> Result<f64> {
    Ok(sobolev_half_seminorm(u)?.powi(2))
}

/// `L²` gradient of the energy, `2 (-Δ)^{1/2} u`.
pub fn energy_gradient(u: &Field) -> Result<Field> {
    let l = frac_laplacian(u, FracExponent::HALF)?;
    l.map_columns(|c| c.iter().map(|v| 2.0 * v).collect())
}

/// `dE(u)[w] = ∫ ∇E(u) · w`.
pub fn energy_directional_derivative(u: &Field, w: &Field) -> Result<f64> {
    energy_gradient(u)?.inner(w)
}

fn check_target<P: PlaneDistribution + ?Sized>(u: &Field, p: &P) -> Result<()> {
    if u.components() != p.dim() {
        return Err(Error::ShapeMismatch(format!(
            "field has {} components, distribution acts on ℝ^{}",
            u.components(),
            p.dim()
        )));
    }
    let worst = (0..u.n_points()).filter_map(|j| p.target_defect(u.row(j))).fold(0.0, f64::max);
    if worst > 1e-6 {
        return Err(Error::OffManifold(worst));
    }
    Ok(())
}

fn apply_projectors<P: PlaneDistribution + ?Sized>(
    u: &Field,
    v: &Field,
    p: &P,
    proj: impl Fn(&P, &[f64]) -> DMatrix<f64> + Sync,
) -> Result<Field> {
    let m = u.components();
    let samples: Vec<f64> = (0..u.n_points())
        .into_par_iter()
        .flat_map_iter(|j| {
            let out = proj(p, u.row(j)) * DVector::from_column_slice(v.row(j));
            out.iter().copied().collect::<Vec<_>>()
        })
        .collect();
    Field::new(*u.grid(), m, samples)
}

/// `P_T(u) (-Δ)^{1/2} u` at every node.
pub fn el_residual<P: PlaneDistribution + ?Sized>(u: &Field, p: &P) -> Result<Field> {
    check_target(u, p)?;
    let l = frac_laplacian(u, FracExponent::HALF)?;
    apply_projectors(u, &l, p, |p, z| p.tangent_projector(z))
}

/// `P_N(u) u'` at every node, with the spectral derivative.
pub fn horizontality_residual<P: PlaneDistribution + ?Sized>(u: &Field, p: &P) -> Result<Field> {
    check_target(u, p)?;
    let du = derivative(u)?;
    apply_projectors(u, &du, p, |p, z| p.normal_projector(z))
}

/// Max over nodes of the Euclidean norm of a vector field.
pub fn max_norm(f: &Field) -> f64 {
    (0..f.n_points()).map(|j| f.row(j).iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    /// Stop once the max-norm Euler–Lagrange residual drops below this.
    pub tol: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
    /// Upper bound on the step; `None` uses `1/k_max` of the grid.
    pub max_step: Option<f64>,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub min_step: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iterations: 50_000, initial_step: 1e-3, max_step: None, armijo: 1e-4, min_step: 1e-14 }
    }
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub u: Field,
    pub energy: f64,
    pub el_residual_norm: f64,
    pub step: f64,
    pub iteration: usize,
}

/// One accepted step of the flow.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowRecord {
    pub iteration: usize,
    pub energy: f64,
    pub el_residual_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct FlowRun {
    pub state: FlowState,
    pub history: Vec<FlowRecord>,
    pub converged: bool,
    pub rejected_steps: usize,
    /// Accepted steps whose energy exceeds the previous one.
    pub monotonicity_violations: usize,
}

fn retract_field<P: PlaneDistribution + ?Sized>(u: &Field, p: &P) -> Result<Field> {
    let m = u.components();
    let mut samples = Vec::with_capacity(u.samples().len());
    for j in 0..u.n_points() {
        let r = p
            .retract(u.row(j))
            .ok_or_else(|| Error::InvalidArgument("target has no retraction at this point".into()))?;
        samples.extend(r);
    }
    Field::new(*u.grid(), m, samples)
}

/// Identity map `θ ↦ (cos θ, sin θ)` on `n_points` circle nodes.
pub fn identity_map(n_points: usize) -> Result<Field> {
    Field::from_fn_vec(Grid::circle(n_points)?, 2, |t| vec![t.cos(), t.sin()])
}

/// Identity map rotated pointwise by `amplitude · (cos 2θ + ½ sin 3θ)` along
/// the tangent and renormalised onto the circle.
pub fn perturbed_identity(n_points: usize, amplitude: f64) -> Result<Field> {
    Field::from_fn_vec(Grid::circle(n_points)?, 2, |t| {
        let psi = amplitude * ((2.0 * t).cos() + 0.5 * (3.0 * t).sin());
        let v = [t.cos() - psi * t.sin(), t.sin() + psi * t.cos()];
        let r = v[0].hypot(v[1]);
        vec![v[0] / r, v[1] / r]
    })
}

/// Projected gradient flow `u ← Proj(u - τ (-Δ)^{1/2} u)` with Armijo
/// backtracking on the energy. Needs a circle field and a distribution with a
/// retraction. Non-convergence is reported through `FlowRun::converged`.
pub fn gradient_flow<P: PlaneDistribution + ?Sized>(u0: &Field, p: &P, options: &FlowOptions) -> Result<FlowRun> {
    let circle = u0.grid().as_circle()?;
    check_target(u0, p)?;
    if p.retract(u0.row(0)).is_none() {
        return invalid("the flow needs a target with a retraction");
    }
    let max_step = options.max_step.unwrap_or(1.0 / circle.n_modes().max(1) as f64);
    let weight = u0.grid().weight();
    let mut u = retract_field(u0, p)?;
    let mut e = energy(&u)?;
    let mut lap = frac_laplacian(&u, FracExponent::HALF)?;
    let mut res = max_norm(&apply_projectors(&u, &lap, p, |p, z| p.tangent_projector(z))?);
    let mut tau = options.initial_step.min(max_step);
    let mut history = Vec::new();
    let (mut rejected, mut violations, mut iteration) = (0, 0, 0);
    let mut converged = res < options.tol;
    while !converged && iteration < options.max_iterations {
        let tangential = apply_projectors(&u, &lap, p, |p, z| p.tangent_projector(z))?;
        let g2 = tangential.samples().iter().map(|v| v * v).sum::<f64>() * weight;
        let accepted = loop {
            let trial = retract_field(&u.linear_combination(1.0, &lap, -tau)?, p)?;
            let et = energy(&trial)?;
            let decrease = options.armijo * tau * 2.0 * g2;
            // Below roundoff of the energy, plain non-increase is all that can be checked.
            if et <= e - decrease || (decrease <= 64.0 * f64::EPSILON * e.abs() && et <= e) {
                break Some((trial, et));
            }
            rejected += 1;
            tau *= 0.5;
            if tau < options.min_step {
                break None;
            }
        };
        let Some((next, en)) = accepted else { break };
        if en > e {
            violations += 1;
        }
        iteration += 1;
        u = next;
        e = en;
        lap = frac_laplacian(&u, FracExponent::HALF)?;
        res = max_norm(&apply_projectors(&u, &lap, p, |p, z| p.tangent_projector(z))?);
        history.push(FlowRecord { iteration, energy: e, el_residual_norm: res, step: tau });
        converged = res < options.tol;
        tau = (tau * 1.5).min(max_step);
    }
    log::debug!("flow stopped after {iteration} steps, residual {res:e}, energy {e}");
    Ok(FlowRun {
        state: FlowState { u, energy: e, el_residual_norm: res, step: tau, iteration },
        history,
        converged,
        rejected_steps: rejected,
        monotonicity_violations: violations,
    })
}

/// Evaluates the trigonometric interpolant with normalised coefficients at
/// `z = e^{iα}` by Horner's rule in `z` and `z̄`.
fn eval_on_circle(coeffs: &[Complex64], z: Complex64) -> f64 {
    let n = coeffs.len();
    let top = (n - 1) / 2;
    let mut pos = Complex64::new(0.0, 0.0);
    for d in (0..=top).rev() {
        pos = pos * z + coeffs[d];
    }
    let zc = z.conj();
    let mut neg = Complex64::new(0.0, 0.0);
    for d in (1..=top).rev() {
        neg = (neg + coeffs[n - d]) * zc;
    }
    let mut v = (pos + neg).re;
    if n % 2 == 0 {
        v += coeffs[n / 2].re * z.powu((n / 2) as u32).re;
    }
    v
}

/// `u ∘ φ_b` sampled on `n_points` nodes, `φ_b(z) = (z - b)/(1 - b̄ z)`.
fn compose_at(u: &Field, b: Complex64, n_points: usize) -> Result<Field> {
    let grid = Grid::circle(n_points)?;
    let spectra = u.spectra();
    let m = u.components();
    let samples: Vec<f64> = grid
        .nodes()
        .par_iter()
        .flat_map_iter(|&theta| {
            let z = Complex64::from_polar(1.0, theta);
            let w = (z - b) / (Complex64::new(1.0, 0.0) - b.conj() * z);
            let w = w / w.norm();
            spectra.iter().map(move |c| eval_on_circle(c, w)).collect::<Vec<_>>()
        })
        .collect();
    Field::new(grid, m, samples)
}

const MAX_COMPOSE_POINTS: usize = 1 << 22;

/// `u ∘ φ_b` for a disc automorphism `φ_b(z) = (z - b)/(1 - b̄ z)`, `|b| < 1`.
/// `u` is evaluated band-limited; the resolution doubles until the energy
/// changes by at most `1e-8` relative.
pub fn mobius_compose_at(u: &Field, b: Complex64) -> Result<Field> {
    u.grid().as_circle()?;
    if !(b.norm() < 1.0) {
        return invalid(format!("Möbius parameter must lie in the unit disc, got |b| = {}", b.norm()));
    }
    if b == Complex64::new(0.0, 0.0) {
        return Ok(u.clone());
    }
    let mut n = u.n_points().max(64).next_power_of_two();
    let mut e_prev = energy(&compose_at(u, b, n)?)?;
    loop {
        n *= 2;
        if n > MAX_COMPOSE_POINTS {
            return Err(Error::UnderResolved(format!(
                "Möbius composition with |b| = {} did not stabilise below {MAX_COMPOSE_POINTS} points",
                b.norm()
            )));
        }
        let cur = compose_at(u, b, n)?;
        let e = energy(&cur)?;
        if (e - e_prev).abs() <= 1e-8 * e.abs().max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        e_prev = e;
    }
}

/// `u ∘ φ_a` with `φ_a(e^{iθ}) = (e^{iθ} - a)/(1 - a e^{iθ})`, `a ∈ (-1, 1)`.
pub fn mobius_compose(u: &Field, a: f64) -> Result<Field> {
    if !(a.abs() < 1.0) {
        return invalid(format!("Möbius parameter must satisfy |a| < 1, got {a}"));
    }
    mobius_compose_at(u, Complex64::new(a, 0.0))
}

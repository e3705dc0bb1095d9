//! Concentration of `u ∘ φ_b` as `|b| → 1`, measured on the line.
//!
//! The Möbius parameter is `b = i a`, so the bubble forms at `θ = π/2`, which
//! stereographic projection sends to `x = 0`. There
//! `(u ∘ φ_b ∘ Π^{-1})(x) = (u ∘ Π^{-1})(x/λ)` with `λ = (1 - a)/(1 + a)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{el_residual, energy, eval_on_circle, max_norm, mobius_compose_at, SphereDistribution};
use crate::error::{invalid, Result};
use crate::fit::{power_law_fit, PowerFit};
use crate::fracops::{frac_laplacian_line_quadrature, Convention};
use crate::geometry::{Field, FracExponent, Grid, LineGrid, TailModel};
use crate::norms::{report, Region};
use crate::stereo::unproject;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleOptions {
    /// Outer scale `R`.
    pub big_r: f64,
    /// Neck parameters `Λ`; annuli run from `Λ r(a)` to `R/(2Λ)`.
    pub necks: Vec<f64>,
    /// An annulus enters the profile fit when its squared `L²` norm is below
    /// `gate` times the total energy.
    pub gate: f64,
    /// Grid spacing in units of the concentration scale `λ`.
    pub spacing: f64,
    /// The line window is `margin` times the largest annulus radius.
    pub margin: f64,
}

impl Default for BubbleOptions {
    fn default() -> Self {
        Self { big_r: 4.0, necks: vec![2.0, 4.0, 8.0], gate: 0.1, spacing: 0.125, margin: 4.0 }
    }
}

/// Norms of `f = (-Δ)^{1/4}` of the transferred map over the neck annuli.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeckReport {
    pub a: f64,
    /// `λ = (1 - a)/(1 + a)`.
    pub scale: f64,
    /// `r(a) = 1 - a`.
    pub concentration_radius: f64,
    pub big_r: f64,
    pub neck: f64,
    /// `(r, R)` per annulus. When the neck is empty this is the single
    /// annulus `(r(a), R)`.
    pub annuli: Vec<(f64, f64)>,
    pub empty_neck: bool,
    pub l2: Vec<f64>,
    pub l21: Vec<f64>,
    pub l2inf: Vec<f64>,
    /// `max` of `l2` over the annuli.
    pub dyadic_sup: f64,
    pub neck_l2: f64,
    pub neck_l2inf: f64,
    /// `∫ |f|²` over the window.
    pub total_energy: f64,
    pub energy_u: f64,
    pub energy_composed: f64,
    pub gated_annuli: usize,
    /// `|f| ≈ c |x|^{-p}` on the gated annuli; `None` when fewer than two pass
    /// the gate or the neck is empty.
    pub fit: Option<PowerFit>,
}

fn annuli_for(r: f64, big_r: f64, neck: f64) -> (Vec<(f64, f64)>, bool) {
    let mut out = Vec::new();
    let mut rho = neck * r;
    let end = big_r / (2.0 * neck);
    while 2.0 * rho <= end * (1.0 + 1e-12) {
        out.push((rho, 2.0 * rho));
        rho *= 2.0;
    }
    if out.is_empty() {
        (vec![(r, big_r)], true)
    } else {
        (out, false)
    }
}

/// Runs the experiment for each `a`. `u` must be a sphere-valued circle field
/// with Euler–Lagrange residual at most `1e-8`.
pub fn bubbling_experiment(u: &Field, a_values: &[f64], options: &BubbleOptions) -> Result<Vec<NeckReport>> {
    u.grid().as_circle()?;
    let sphere = SphereDistribution::new(u.components())?;
    let el = max_norm(&el_residual(u, &sphere)?);
    if el > 1e-8 {
        return invalid(format!("bubbling needs a half-harmonic map, EL residual is {el:e}"));
    }
    if let Some(a) = a_values.iter().find(|a| !(0.0..1.0).contains(*a)) {
        return invalid(format!("bubbling parameters must lie in [0, 1), got {a}"));
    }
    if options.necks.iter().any(|l| *l <= 0.0) || options.big_r <= 0.0 {
        return invalid("neck parameters and R must be positive");
    }
    let energy_u = energy(u)?;
    let reports: Vec<Vec<NeckReport>> =
        a_values.par_iter().map(|&a| run_one(u, a, energy_u, options)).collect::<Result<_>>()?;
    Ok(reports.into_iter().flatten().collect())
}

fn run_one(u: &Field, a: f64, energy_u: f64, options: &BubbleOptions) -> Result<Vec<NeckReport>> {
    let b = Complex64::new(0.0, a);
    let lambda = (1.0 - a) / (1.0 + a);
    let r = 1.0 - a;
    let energy_composed = energy(&mobius_compose_at(u, b)?)?;
    // (neck, annuli, empty neck) per neck ratio.
    let layouts: Vec<_> = options
        .necks
        .iter()
        .map(|&neck| {
            let (ann, empty) = annuli_for(r, options.big_r, neck);
            (neck, ann, empty)
        })
        .collect();
    let outer = layouts.iter().flat_map(|(_, ann, _)| ann.iter().map(|p| p.1)).fold(0.0, f64::max);
    let half_width = options.margin * outer;
    let n = ((2.0 * half_width / (lambda * options.spacing)).ceil() as usize).next_power_of_two().max(1024);
    let grid = LineGrid::new(half_width, n)?;

    let spectra = u.spectra();
    let phi = |z: Complex64| {
        let w = (z - b) / (Complex64::new(1.0, 0.0) - b.conj() * z);
        w / w.norm()
    };
    let m = u.components();
    let samples: Vec<f64> = grid
        .nodes()
        .par_iter()
        .flat_map_iter(|&x| {
            let (c, s) = unproject(x);
            let w = phi(Complex64::new(c, s));
            spectra.iter().map(move |co| eval_on_circle(co, w)).collect::<Vec<_>>()
        })
        .collect();
    let pole = phi(Complex64::new(0.0, -1.0));
    let w = Field::new(Grid::Line(grid), m, samples)?;
    let tails = (0..m)
        .map(|c| {
            let limit = eval_on_circle(&spectra[c], pole);
            TailModel::fit(&grid, &w.component(c), 1.0, limit, limit)
        })
        .collect();
    let w = w.with_tails(tails)?;
    let f = frac_laplacian_line_quadrature(&w, FracExponent::QUARTER, Convention::Normalized)?;
    let total_energy = report(&f, &Region::All)?.l2.powi(2);

    let nodes = grid.nodes();
    layouts
        .into_iter()
        .map(|(neck, annuli, empty)| {
            let mut l2 = Vec::new();
            let mut l21 = Vec::new();
            let mut l2inf = Vec::new();
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            let mut gated = 0;
            for &(lo, hi) in &annuli {
                let region = Region::annulus(0.0, lo, hi)?;
                let rep = report(&f, &region)?;
                if !empty && rep.l2.powi(2) < options.gate * total_energy {
                    gated += 1;
                    for j in region.indices(f.grid()) {
                        xs.push(nodes[j]);
                        ys.push(f.row(j).iter().map(|v| v * v).sum::<f64>().sqrt());
                    }
                }
                l2.push(rep.l2);
                l21.push(rep.l21);
                l2inf.push(rep.l2inf);
            }
            let whole = report(&f, &Region::annulus(0.0, annuli[0].0, annuli[annuli.len() - 1].1)?)?;
            let fit = if gated >= 2 { Some(power_law_fit(&xs, &ys)?) } else { None };
            Ok(NeckReport {
                a,
                scale: lambda,
                concentration_radius: r,
                big_r: options.big_r,
                neck,
                dyadic_sup: l2.iter().copied().fold(0.0, f64::max),
                annuli,
                empty_neck: empty,
                l2,
                l21,
                l2inf,
                neck_l2: whole.l2,
                neck_l2inf: whole.l2inf,
                total_energy,
                energy_u,
                energy_composed,
                gated_annuli: gated,
                fit,
            })
        })
        .collect()
}

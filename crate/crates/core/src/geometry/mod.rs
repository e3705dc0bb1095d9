//! Sampling grids on the truncated line and the circle, and the sampled
//! field type every operator consumes.

mod interp;
mod io;

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral;

pub use interp::{lagrange_line, lagrange_periodic, monotone_cubic_periodic, trig_eval, Interpolation};
pub use io::{read_binary, read_csv, write_binary, write_csv};

/// Fractional exponent `s ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FracExponent(f64);

impl FracExponent {
    pub const QUARTER: FracExponent = FracExponent(0.25);
    pub const HALF: FracExponent = FracExponent(0.5);
    pub const ONE: FracExponent = FracExponent(1.0);

    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s <= 1.0 {
            Ok(Self(s))
        } else {
            invalid(format!("fractional exponent must lie in (0, 1], got {s}"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Cell-centred grid on `[-L, L]`: `x_j = -L + (j + 1/2) h`, `h = 2L / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    half_width: f64,
    n_points: usize,
}

impl LineGrid {
    pub const DEFAULT_HALF_WIDTH: f64 = 1e3;
    pub const DEFAULT_POINTS: usize = 1 << 16;

    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width must be positive, got {half_width}")));
        }
        if n_points < 8 || n_points % 2 != 0 {
            return Err(Error::InvalidGrid(format!("line grid needs an even point count >= 8, got {n_points}")));
        }
        Ok(Self { half_width, n_points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    /// Angular frequency of signed FFT mode `k`.
    pub fn frequency(&self, k: i64) -> f64 {
        PI * k as f64 / self.half_width
    }
}

impl Default for LineGrid {
    fn default() -> Self {
        Self { half_width: Self::DEFAULT_HALF_WIDTH, n_points: Self::DEFAULT_POINTS }
    }
}

/// Uniform grid `θ_j = 2πj / n` on the circle with `n = 2 · n_modes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleGrid {
    n_modes: usize,
}

impl CircleGrid {
    pub const DEFAULT_POINTS: usize = 4096;

    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::InvalidGrid(format!("circle grid needs at least 2 modes, got {n_modes}")));
        }
        Ok(Self { n_modes })
    }

    pub fn with_points(n_points: usize) -> Result<Self> {
        if n_points % 2 != 0 {
            return Err(Error::InvalidGrid(format!("circle point count must be even, got {n_points}")));
        }
        Self::new(n_points / 2)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_points(&self) -> usize {
        2 * self.n_modes
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n_points() as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points()).map(|j| self.node(j)).collect()
    }
}

impl Default for CircleGrid {
    fn default() -> Self {
        Self { n_modes: Self::DEFAULT_POINTS / 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "lowercase")]
pub enum Grid {
    Line(LineGrid),
    Circle(CircleGrid),
}

impl Grid {
    pub fn line(half_width: f64, n_points: usize) -> Result<Self> {
        LineGrid::new(half_width, n_points).map(Grid::Line)
    }

    pub fn circle(n_points: usize) -> Result<Self> {
        CircleGrid::with_points(n_points).map(Grid::Circle)
    }

    pub fn n_points(&self) -> usize {
        match self {
            Grid::Line(g) => g.n_points(),
            Grid::Circle(g) => g.n_points(),
        }
    }

    pub fn node(&self, j: usize) -> f64 {
        match self {
            Grid::Line(g) => g.node(j),
            Grid::Circle(g) => g.node(j),
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        match self {
            Grid::Line(g) => g.nodes(),
            Grid::Circle(g) => g.nodes(),
        }
    }

    /// Quadrature weight of every node (midpoint on the line, trapezoid on the circle).
    pub fn weight(&self) -> f64 {
        match self {
            Grid::Line(g) => g.spacing(),
            Grid::Circle(g) => g.spacing(),
        }
    }

    /// Index of the node `-x_j` (line) or `-θ_j mod 2π` (circle).
    pub fn reflect(&self, j: usize) -> usize {
        let n = self.n_points();
        match self {
            Grid::Line(_) => n - 1 - j,
            Grid::Circle(_) => (n - j) % n,
        }
    }

    pub fn as_line(&self) -> Result<&LineGrid> {
        match self {
            Grid::Line(g) => Ok(g),
            Grid::Circle(_) => Err(Error::InvalidGrid("expected a line grid".into())),
        }
    }

    pub fn as_circle(&self) -> Result<&CircleGrid> {
        match self {
            Grid::Circle(g) => Ok(g),
            Grid::Line(_) => Err(Error::InvalidGrid("expected a circle grid".into())),
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Grid::Line(_))
    }

    /// Signed spectral frequency of mode `k` (`k` itself on the circle).
    pub fn frequency(&self, k: i64) -> f64 {
        match self {
            Grid::Line(g) => g.frequency(k),
            Grid::Circle(_) => k as f64,
        }
    }
}

/// Far-field model `f(x) ≈ limit± + coeff± |x|^{-exponent}` for `x → ±∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub exponent: f64,
    pub limit_left: f64,
    pub limit_right: f64,
    pub coeff_left: f64,
    pub coeff_right: f64,
}

impl TailModel {
    /// Field vanishes beyond the grid.
    pub fn zero() -> Self {
        Self { exponent: 2.0, limit_left: 0.0, limit_right: 0.0, coeff_left: 0.0, coeff_right: 0.0 }
    }

    pub fn decaying(exponent: f64, coeff_left: f64, coeff_right: f64) -> Self {
        Self { exponent, limit_left: 0.0, limit_right: 0.0, coeff_left, coeff_right }
    }

    pub fn symmetric(exponent: f64, coeff: f64) -> Self {
        Self::decaying(exponent, coeff, coeff)
    }

    pub fn constant(value: f64) -> Self {
        Self { exponent: 2.0, limit_left: value, limit_right: value, coeff_left: 0.0, coeff_right: 0.0 }
    }

    /// Matches the coefficients to the outermost samples for a given exponent and limits.
    pub fn fit(grid: &LineGrid, samples: &[f64], exponent: f64, limit_left: f64, limit_right: f64) -> Self {
        let n = grid.n_points();
        let xl = grid.node(0).abs();
        let xr = grid.node(n - 1).abs();
        Self {
            exponent,
            limit_left,
            limit_right,
            coeff_left: (samples[0] - limit_left) * xl.powf(exponent),
            coeff_right: (samples[n - 1] - limit_right) * xr.powf(exponent),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let a = x.abs().powf(-self.exponent);
        if x < 0.0 {
            self.limit_left + self.coeff_left * a
        } else {
            self.limit_right + self.coeff_right * a
        }
    }

    /// Has the tail a finite integral.
    pub fn integrable(&self) -> bool {
        self.limit_left == 0.0
            && self.limit_right == 0.0
            && (self.exponent > 1.0 || (self.coeff_left == 0.0 && self.coeff_right == 0.0))
    }

    pub fn reflected(&self) -> Self {
        Self {
            exponent: self.exponent,
            limit_left: self.limit_right,
            limit_right: self.limit_left,
            coeff_left: self.coeff_right,
            coeff_right: self.coeff_left,
        }
    }

    fn combine(&self, other: &Self, a: f64, b: f64) -> Self {
        Self {
            exponent: self.exponent,
            limit_left: a * self.limit_left + b * other.limit_left,
            limit_right: a * self.limit_right + b * other.limit_right,
            coeff_left: a * self.coeff_left + b * other.coeff_left,
            coeff_right: a * self.coeff_right + b * other.coeff_right,
        }
    }
}

/// An `m`-component real field sampled on a grid, stored row-major
/// (`samples[j * m + c]`). The spectrum is computed on first use.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid,
    m: usize,
    samples: Vec<f64>,
    tails: Option<Vec<TailModel>>,
    spectrum: OnceLock<Vec<Vec<Complex64>>>,
}

impl Field {
    pub fn new(grid: Grid, m: usize, samples: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return invalid("field needs at least one component");
        }
        if samples.len() != grid.n_points() * m {
            return Err(Error::ShapeMismatch(format!(
                "expected {} samples for {} points x {} components, got {}",
                grid.n_points() * m,
                grid.n_points(),
                m,
                samples.len()
            )));
        }
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite sample at flat index {j}"));
        }
        Ok(Self { grid, m, samples, tails: None, spectrum: OnceLock::new() })
    }

    /// Scalar field from a closure of the node coordinate.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid, f: F) -> Result<Self> {
        let samples = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, 1, samples)
    }

    /// Vector field from a closure returning all components at a node.
    pub fn from_fn_vec<F: Fn(f64) -> Vec<f64>>(grid: Grid, m: usize, f: F) -> Result<Self> {
        let mut samples = Vec::with_capacity(grid.n_points() * m);
        for x in grid.nodes() {
            let v = f(x);
            if v.len() != m {
                return Err(Error::ShapeMismatch(format!("closure returned {} components, expected {m}", v.len())));
            }
            samples.extend(v);
        }
        Self::new(grid, m, samples)
    }

    /// Builds a field from per-component columns.
    pub fn from_components(grid: Grid, columns: &[Vec<f64>]) -> Result<Self> {
        let m = columns.len();
        let n = grid.n_points();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::ShapeMismatch("component length differs from grid size".into()));
        }
        let mut samples = vec![0.0; n * m];
        for (c, col) in columns.iter().enumerate() {
            for (j, v) in col.iter().enumerate() {
                samples[j * m + c] = *v;
            }
        }
        Self::new(grid, m, samples)
    }

    /// Inverse of [`Field::spectrum`]: builds samples from normalised coefficients.
    pub fn from_spectrum(grid: Grid, spectra: Vec<Vec<Complex64>>) -> Result<Self> {
        let columns: Vec<Vec<f64>> = spectra.iter().map(|c| spectral::inverse_real(c)).collect();
        let f = Self::from_components(grid, &columns)?;
        let _ = f.spectrum.set(spectra);
        Ok(f)
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tails = Some(vec![tail; self.m]);
        self
    }

    pub fn with_tails(mut self, tails: Vec<TailModel>) -> Result<Self> {
        if tails.len() != self.m {
            return Err(Error::ShapeMismatch("one tail model per component required".into()));
        }
        self.tails = Some(tails);
        Ok(self)
    }

    pub fn without_tail(mut self) -> Self {
        self.tails = None;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.m
    }

    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn value(&self, j: usize, c: usize) -> f64 {
        self.samples[j * self.m + c]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.samples[j * self.m..(j + 1) * self.m]
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.samples.iter().skip(c).step_by(self.m).copied().collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|c| self.component(c)).collect()
    }

    pub fn tail(&self, c: usize) -> Option<&TailModel> {
        self.tails.as_ref().map(|t| &t[c])
    }

    pub fn tails(&self) -> Option<&[TailModel]> {
        self.tails.as_deref()
    }

    /// Normalised spectrum of every component (cached).
    pub fn spectra(&self) -> &[Vec<Complex64>] {
        self.spectrum.get_or_init(|| (0..self.m).map(|c| spectral::forward(&self.component(c))).collect())
    }

    pub fn spectrum(&self, c: usize) -> &[Complex64] {
        &self.spectra()[c]
    }

    pub fn has_cached_spectrum(&self) -> bool {
        self.spectrum.get().is_some()
    }

    /// Same grid and tails, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        let mut f = Self::new(self.grid, self.m, samples)?;
        f.tails = self.tails.clone();
        Ok(f)
    }

    /// Applies `op` to every component column.
    pub fn map_columns<F: Fn(&[f64]) -> Vec<f64>>(&self, op: F) -> Result<Self> {
        let cols: Vec<Vec<f64>> = self.columns().iter().map(|c| op(c)).collect();
        Self::from_components(self.grid, &cols)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Quadrature pairing `Σ_c ∫ f_c g_c`.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.check_compatible(other)?;
        let s: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).sum();
        Ok(s * self.grid.weight())
    }

    /// Quadrature integral of component `c`.
    pub fn integral(&self, c: usize) -> f64 {
        self.component(c).iter().sum::<f64>() * self.grid.weight()
    }

    pub fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid || self.m != other.m {
            return Err(Error::ShapeMismatch("fields live on different grids or component counts".into()));
        }
        Ok(())
    }

    pub fn linear_combination(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        self.check_compatible(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(x, y)| a * x + b * y).collect();
        let mut f = Self::new(self.grid, self.m, samples)?;
        f.tails = match (&self.tails, &other.tails) {
            (Some(s), Some(o)) if s.iter().zip(o).all(|(p, q)| p.exponent == q.exponent) => {
                Some(s.iter().zip(o).map(|(p, q)| p.combine(q, a, b)).collect())
            }
            _ => None,
        };
        Ok(f)
    }

    /// Reflected field `x ↦ f(-x)`.
    pub fn reflected(&self) -> Field {
        let n = self.n_points();
        let mut samples = vec![0.0; self.samples.len()];
        for j in 0..n {
            let r = self.grid.reflect(j);
            samples[j * self.m..(j + 1) * self.m].copy_from_slice(self.row(r));
        }
        Field {
            grid: self.grid,
            m: self.m,
            samples,
            tails: self.tails.as_ref().map(|t| t.iter().map(TailModel::reflected).collect()),
            spectrum: OnceLock::new(),
        }
    }

    /// Evaluates component `c` at an arbitrary point. Line points beyond the
    /// grid use the tail model.
    pub fn eval(&self, c: usize, x: f64, method: Interpolation) -> Result<f64> {
        match &self.grid {
            Grid::Line(g) => {
                let edge = g.half_width();
                if x.abs() > edge {
                    return match self.tail(c) {
                        Some(t) => Ok(t.eval(x)),
                        None => Err(Error::MissingTailModel(format!("point {x} lies outside [-{edge}, {edge}]"))),
                    };
                }
                Ok(interp::lagrange_line(g, &self.component(c), x))
            }
            Grid::Circle(_) => {
                let col = self.component(c);
                Ok(match method {
                    Interpolation::BandLimited => interp::trig_eval(self.spectrum(c), x),
                    Interpolation::MonotoneCubic => interp::monotone_cubic_periodic(&col, x),
                    Interpolation::Lagrange => interp::lagrange_periodic(&col, x),
                })
            }
        }
    }
}

/// `f⁺(x) = (f(x) + f(-x)) / 2`.
pub fn even_part(f: &Field) -> Field {
    parity_part(f, 1.0)
}

/// `f⁻(x) = (f(x) - f(-x)) / 2`.
pub fn odd_part(f: &Field) -> Field {
    parity_part(f, -1.0)
}

fn parity_part(f: &Field, sign: f64) -> Field {
    let r = f.reflected();
    let samples = f.samples.iter().zip(&r.samples).map(|(a, b)| 0.5 * (a + sign * b)).collect();
    let tails = match (&f.tails, &r.tails) {
        (Some(t), Some(u)) => Some(t.iter().zip(u).map(|(p, q)| p.combine(q, 0.5, 0.5 * sign)).collect()),
        _ => None,
    };
    Field { grid: f.grid, m: f.m, samples, tails, spectrum: OnceLock::new() }
}

/// Re-samples `f` on `target`: band-limited on the circle, local
/// 8-point Lagrange on the line (tail model beyond the source window).
pub fn resample(f: &Field, target: &Grid) -> Result<Field> {
    match (&f.grid, target) {
        (Grid::Circle(src), Grid::Circle(dst)) => {
            let n_old = src.n_points();
            let n_new = dst.n_points();
            let mut spectra = Vec::with_capacity(f.m);
            for c in 0..f.m {
                let coeffs = f.spectrum(c);
                if n_new < n_old {
                    let total: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
                    let kept = (n_new as i64) / 2;
                    let dropped: f64 = coeffs
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| spectral::signed_mode(*k, n_old).abs() >= kept)
                        .map(|(_, z)| z.norm_sqr())
                        .sum();
                    if dropped > 1e-20 * total.max(f64::MIN_POSITIVE) {
                        return Err(Error::Aliasing(format!(
                            "downsampling {n_old} -> {n_new} discards {:.3e} of the spectral energy",
                            dropped / total
                        )));
                    }
                }
                spectra.push(spectral::resize_spectrum(coeffs, n_new));
            }
            let columns: Vec<Vec<f64>> = spectra.iter().map(|c| spectral::inverse_real(c)).collect();
            Field::from_components(*target, &columns)
        }
        (Grid::Line(src), Grid::Line(dst)) => {
            if dst.spacing() > src.spacing() * (1.0 + 1e-12) {
                log::warn!("line resample coarsens spacing {} -> {}", src.spacing(), dst.spacing());
            }
            let nodes = dst.nodes();
            let mut cols = Vec::with_capacity(f.m);
            for c in 0..f.m {
                let col = f.component(c);
                let mut out = Vec::with_capacity(nodes.len());
                for &x in &nodes {
                    if x.abs() > src.half_width() {
                        match f.tail(c) {
                            Some(t) => out.push(t.eval(x)),
                            None => {
                                return Err(Error::MissingTailModel(format!(
                                    "target node {x} lies beyond the source window"
                                )))
                            }
                        }
                    } else {
                        out.push(interp::lagrange_line(src, &col, x));
                    }
                }
                cols.push(out);
            }
            let mut out = Field::from_components(*target, &cols)?;
            out.tails = f.tails.clone();
            Ok(out)
        }
        _ => Err(Error::InvalidGrid("resample cannot change geometry; use the stereo module".into())),
    }
}

#[cfg(test)]
mod tests;

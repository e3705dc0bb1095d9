//! Discrete `L^p`, Lorentz `L^{2,1}` / `L^{2,∞}` and `Ḣ^{1/2}` norms.
//!
//! The measure is the spacing-weighted counting measure of the grid. Vector
//! fields are measured through their pointwise Euclidean norm.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fracops;
use crate::geometry::{Field, Grid};

/// Set of grid nodes a norm is restricted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    All,
    /// Closed interval `[lo, hi]` (angles on the circle, taken mod 2π).
    Interval {
        lo: f64,
        hi: f64,
    },
    /// `{ inner ≤ |x - center| < outer }`; angular distance on the circle.
    Annulus {
        center: f64,
        inner: f64,
        outer: f64,
    },
    Complement {
        region: Box<Region>,
    },
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return invalid(format!("interval needs lo <= hi, got [{lo}, {hi}]"));
        }
        Ok(Region::Interval { lo, hi })
    }

    pub fn annulus(center: f64, inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && inner < outer) {
            return invalid(format!("annulus needs 0 <= r < R, got r = {inner}, R = {outer}"));
        }
        Ok(Region::Annulus { center, inner, outer })
    }

    pub fn complement(self) -> Self {
        Region::Complement { region: Box::new(self) }
    }

    pub fn contains(&self, grid: &Grid, x: f64) -> bool {
        match self {
            Region::All => true,
            Region::Interval { lo, hi } => match grid {
                Grid::Line(_) => x >= *lo && x <= *hi,
                Grid::Circle(_) => {
                    let t = (x - lo).rem_euclid(2.0 * PI);
                    t <= hi - lo || hi - lo >= 2.0 * PI
                }
            },
            Region::Annulus { center, inner, outer } => {
                let d = match grid {
                    Grid::Line(_) => (x - center).abs(),
                    Grid::Circle(_) => {
                        let t = (x - center).rem_euclid(2.0 * PI);
                        t.min(2.0 * PI - t)
                    }
                };
                d >= *inner && d < *outer
            }
            Region::Complement { region } => !region.contains(grid, x),
        }
    }

    pub fn indices(&self, grid: &Grid) -> Vec<usize> {
        (0..grid.n_points()).filter(|&j| self.contains(grid, grid.node(j))).collect()
    }
}

fn pointwise_magnitudes(f: &Field, region: &Region) -> Result<Vec<f64>> {
    let idx = region.indices(f.grid());
    if idx.is_empty() {
        return Err(Error::InvalidArgument("region contains no grid nodes".into()));
    }
    Ok(idx.iter().map(|&j| f.row(j).iter().map(|v| v * v).sum::<f64>().sqrt()).collect())
}

/// `(Σ w_j |v_j|^p)^{1/p}`; `p = ∞` gives the max.
pub fn lp_weighted(values: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return invalid(format!("p must be >= 1, got {p}"));
    }
    if values.is_empty() {
        return invalid("empty sample set");
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |a, v| a.max(v.abs())));
    }
    let s: f64 = values.iter().zip(weights).map(|(v, w)| w * v.abs().powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

/// Lorentz `(L^{2,1}, L^{2,∞})` norms of samples with cell measures `weights`.
///
/// With `f*_k` the decreasing rearrangement and `μ_k` the cumulative measure of
/// the `k` largest samples, `L^{2,1} = Σ f*_k (μ_k^{1/2} - μ_{k-1}^{1/2})` and
/// `L^{2,∞} = max_k f*_k μ_k^{1/2}`. Ties keep their original order.
pub fn lorentz_weighted(values: &[f64], weights: &[f64]) -> (f64, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()));
    let (mut mu, mut l21, mut l2inf) = (0.0f64, 0.0f64, 0.0f64);
    for j in order {
        let v = values[j].abs();
        let next = mu + weights[j];
        l21 += v * (next.sqrt() - mu.sqrt());
        l2inf = l2inf.max(v * next.sqrt());
        mu = next;
    }
    (l21, l2inf)
}

pub fn lp_norm(f: &Field, p: f64, region: &Region) -> Result<f64> {
    let v = pointwise_magnitudes(f, region)?;
    let w = vec![f.grid().weight(); v.len()];
    lp_weighted(&v, &w, p)
}

pub fn lorentz_21(f: &Field, region: &Region) -> Result<f64> {
    let v = pointwise_magnitudes(f, region)?;
    Ok(lorentz_weighted(&v, &vec![f.grid().weight(); v.len()]).0)
}

pub fn lorentz_2inf(f: &Field, region: &Region) -> Result<f64> {
    let v = pointwise_magnitudes(f, region)?;
    Ok(lorentz_weighted(&v, &vec![f.grid().weight(); v.len()]).1)
}

/// All three norms of one region, as emitted by the `norms report` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormReport {
    pub region: Region,
    pub l2: f64,
    pub l21: f64,
    pub l2inf: f64,
}

pub fn report(f: &Field, region: &Region) -> Result<NormReport> {
    let v = pointwise_magnitudes(f, region)?;
    let w = vec![f.grid().weight(); v.len()];
    let (l21, l2inf) = lorentz_weighted(&v, &w);
    Ok(NormReport { region: region.clone(), l2: lp_weighted(&v, &w, 2.0)?, l21, l2inf })
}

/// `‖(-Δ)^{1/4} f‖_2` by Parseval. Line fields are treated as periodic on the
/// window and must carry a tail model.
pub fn sobolev_half_seminorm(f: &Field) -> Result<f64> {
    let (period, grid) = match f.grid() {
        Grid::Circle(_) => (2.0 * PI, *f.grid()),
        Grid::Line(g) => {
            if f.tails().is_none() {
                return Err(Error::MissingTailModel("Ḣ^{1/2} seminorm of a line field needs a tail model".into()));
            }
            (2.0 * g.half_width(), *f.grid())
        }
    };
    let n = f.n_points();
    let mut total = 0.0;
    for coeffs in f.spectra() {
        for (k, c) in coeffs.iter().enumerate() {
            let xi = grid.frequency(crate::spectral::signed_mode(k, n)).abs();
            total += xi * c.norm_sqr();
        }
    }
    Ok((period * total).sqrt())
}

/// Gagliardo form of the circle seminorm,
/// `(1/2π) ∬ |u(θ) - u(φ)|² / (4 sin²((θ - φ)/2)) dθ dφ`, with the diagonal
/// replaced by its limit `|u'(θ)|²`. Exact for trigonometric polynomials of
/// degree below `n/2`.
pub fn gagliardo_half_seminorm_circle(f: &Field) -> Result<f64> {
    let g = f.grid().as_circle()?;
    let n = g.n_points();
    let h = g.spacing();
    let m = f.components();
    let du = fracops::derivative(f)?;
    let weights: Vec<f64> =
        (0..n).map(|d| if d == 0 { 0.0 } else { 1.0 / (4.0 * (0.5 * d as f64 * h).sin().powi(2)) }).collect();
    let mut total = 0.0;
    for i in 0..n {
        let ui = f.row(i);
        total += du.row(i).iter().map(|v| v * v).sum::<f64>();
        for j in 0..n {
            if j == i {
                continue;
            }
            let uj = f.row(j);
            let d2: f64 = (0..m).map(|c| (ui[c] - uj[c]).powi(2)).sum();
            total += d2 * weights[(i + n - j) % n];
        }
    }
    Ok((total * h * h / (2.0 * PI)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TailModel;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn line(l: f64, n: usize) -> Grid {
        Grid::line(l, n).unwrap()
    }

    #[test]
    fn indicator_norms() {
        let g = line(2.0, 4000);
        let h = g.weight();
        let f = Field::from_fn(g, |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }).unwrap();
        let l2 = lp_norm(&f, 2.0, &Region::All).unwrap();
        assert!((l2 - 1.0).abs() <= h);
        let ell: f64 = 1.0;
        assert!((lorentz_21(&f, &Region::All).unwrap() - ell.sqrt()).abs() <= h.sqrt());
        assert!((lorentz_2inf(&f, &Region::All).unwrap() - ell.sqrt()).abs() <= h.sqrt());
    }

    #[test]
    fn cosine_l2_and_scaling() {
        let c = Grid::circle(256).unwrap();
        let f = Field::from_fn(c, f64::cos).unwrap();
        assert!((lp_norm(&f, 2.0, &Region::All).unwrap() - PI.sqrt()).abs() < 1e-12);

        let g = line(30.0, 1 << 14);
        let base = Field::from_fn(g, |x| (-x * x).exp()).unwrap();
        let scaled = Field::from_fn(g, |x| (-(3.0 * x).powi(2)).exp()).unwrap();
        let a = lp_norm(&base, 2.0, &Region::All).unwrap();
        let b = lp_norm(&scaled, 2.0, &Region::All).unwrap();
        assert!((b - a / 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn empty_region_rejected() {
        let f = Field::from_fn(line(1.0, 8), |x| x).unwrap();
        assert!(lp_norm(&f, 2.0, &Region::interval(5.0, 6.0).unwrap()).is_err());
        assert!(Region::annulus(0.0, 2.0, 1.0).is_err());
        assert!(lp_norm(&f, 0.5, &Region::All).is_err());
    }

    #[test]
    fn inverse_sqrt_annulus() {
        // f = |x|^{-1/2} on r ≤ |x| < R: L² = (2 log(R/r))^{1/2}, L^{2,∞} = (2(1 - r/R))^{1/2}
        for ratio in [10.0, 100.0, 1000.0] {
            let r = 1.0;
            let g = line(ratio * 1.01, 1 << 20);
            let f = Field::from_fn(g, |x| x.abs().powf(-0.5)).unwrap();
            let region = Region::annulus(0.0, r, r * ratio).unwrap();
            let l2 = lp_norm(&f, 2.0, &region).unwrap();
            assert!((l2 / (2.0 * f64::ln(ratio)).sqrt() - 1.0).abs() < 1e-3, "{ratio}: {l2}");
            let weak = lorentz_2inf(&f, &region).unwrap();
            assert!((weak - (2.0 * (1.0 - 1.0 / ratio)).sqrt()).abs() < 1e-3, "{ratio}: {weak}");
        }
    }

    #[test]
    fn lorentz_duality_on_random_pairs() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let n = 200;
        let w = vec![0.01; n];
        for _ in 0..100 {
            let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0f64).powi(3) * 10.0).collect();
            let g: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let pair: f64 = f.iter().zip(&g).map(|(a, b)| (a * b).abs() * 0.01).sum();
            let (f21, _) = lorentz_weighted(&f, &w);
            let (_, g2inf) = lorentz_weighted(&g, &w);
            assert!(pair <= 2.0 * f21 * g2inf);
        }
    }

    #[test]
    fn seminorm_of_identity_map() {
        let c = Grid::circle(128).unwrap();
        let u = Field::from_fn_vec(c, 2, |t| vec![t.cos(), t.sin()]).unwrap();
        let s = sobolev_half_seminorm(&u).unwrap();
        assert!((s * s - 2.0 * PI).abs() < 1e-12);
        let g = gagliardo_half_seminorm_circle(&u).unwrap();
        assert!((g * g - 2.0 * PI).abs() < 1e-10, "{}", g * g);
        let k = Field::from_fn(c, |_| 4.0).unwrap();
        assert!(sobolev_half_seminorm(&k).unwrap() < 1e-12);
    }

    #[test]
    fn gagliardo_matches_parseval() {
        let c = Grid::circle(64).unwrap();
        let f = Field::from_fn(c, |t| (3.0 * t).sin() + 0.2 * (7.0 * t).cos() + 0.5).unwrap();
        let a = sobolev_half_seminorm(&f).unwrap();
        let b = gagliardo_half_seminorm_circle(&f).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn line_seminorm_needs_tail() {
        let g = line(10.0, 64);
        let f = Field::from_fn(g, |x| (-x * x).exp()).unwrap();
        assert!(sobolev_half_seminorm(&f).is_err());
        assert!(sobolev_half_seminorm(&f.with_tail(TailModel::zero())).is_ok());
    }

    proptest! {
        #[test]
        fn rearrangement_invariance(mut vals in proptest::collection::vec(-5.0f64..5.0, 1..64), seed in 0u64..1000) {
            let w = vec![0.1; vals.len()];
            let (a21, ainf) = lorentz_weighted(&vals, &w);
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            for i in (1..vals.len()).rev() {
                let j = rng.random_range(0..=i);
                vals.swap(i, j);
            }
            let (b21, binf) = lorentz_weighted(&vals, &w);
            prop_assert!((a21 - b21).abs() < 1e-12 && (ainf - binf).abs() < 1e-12);
        }

        #[test]
        fn monotone_in_region(vals in proptest::collection::vec(-5.0f64..5.0, 64), cut in 1usize..63) {
            let f = Field::new(line(1.0, 64), 1, vals).unwrap();
            let small = Region::interval(-1.0, f.grid().node(cut)).unwrap();
            for (a, b) in [
                (lp_norm(&f, 2.0, &small).unwrap(), lp_norm(&f, 2.0, &Region::All).unwrap()),
                (lorentz_21(&f, &small).unwrap(), lorentz_21(&f, &Region::All).unwrap()),
                (lorentz_2inf(&f, &small).unwrap(), lorentz_2inf(&f, &Region::All).unwrap()),
            ] {
                prop_assert!(a <= b + 1e-12);
            }
        }

        #[test]
        fn embedding_ordering(vals in proptest::collection::vec(-5.0f64..5.0, 64)) {
            let f = Field::new(line(1.0, 64), 1, vals).unwrap();
            let l21 = lorentz_21(&f, &Region::All).unwrap();
            let l2 = lp_norm(&f, 2.0, &Region::All).unwrap();
            let weak = lorentz_2inf(&f, &Region::All).unwrap();
            prop_assert!(l2 <= l21 * (1.0 + 1e-12));
            prop_assert!(weak <= l2 * (1.0 + 1e-12));
        }

        #[test]
        fn seminorm_parallelogram(a in proptest::collection::vec(-1.0f64..1.0, 32), b in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let g = Grid::circle(32).unwrap();
            let f = Field::new(g, 1, a).unwrap();
            let h = Field::new(g, 1, b).unwrap();
            let s = f.linear_combination(1.0, &h, 1.0).unwrap();
            let lhs = sobolev_half_seminorm(&s).unwrap().powi(2);
            let rhs = 2.0 * sobolev_half_seminorm(&f).unwrap().powi(2) + 2.0 * sobolev_half_seminorm(&h).unwrap().powi(2);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-14);
        }
    }
}

use super::*;
use crate::geometry::CircleGrid;
use proptest::prelude::*;

fn circle(n: usize) -> Grid {
    Grid::Circle(CircleGrid::with_points(n).unwrap())
}

fn max_err_on(f: &Field, exact: impl Fn(f64) -> f64, window: f64) -> f64 {
    let nodes = f.grid().nodes();
    nodes
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() <= window)
        .map(|(j, &x)| (f.value(j, 0) - exact(x)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn normalization_constant_values() {
    assert!((normalization_constant(FracExponent::HALF) - 1.0 / PI).abs() < 1e-14);
    // C(1, 1/4) = √2 Γ(3/4) / (√π Γ(1/4)... ) evaluated independently
    let q = normalization_constant(FracExponent::QUARTER);
    let expected = 2f64.sqrt() * gamma(0.75) / (PI.sqrt() * gamma(-0.25).abs());
    assert!((q - expected).abs() < 1e-14);
    assert_eq!(normalization_constant(FracExponent::ONE), 0.0);
}

#[test]
fn circle_eigenfunctions() {
    let g = circle(64);
    let f = Field::from_fn(g, |t| (5.0 * t).cos()).unwrap();
    let l = frac_laplacian_circle(&f, FracExponent::HALF).unwrap();
    for j in 0..64 {
        assert!((l.value(j, 0) - 5.0 * (5.0 * g.node(j)).cos()).abs() < 1e-12);
    }
    let c = Field::from_fn(g, |_| 3.0).unwrap();
    assert!(frac_laplacian_circle(&c, FracExponent::new(0.3).unwrap()).unwrap().max_abs() < 1e-13);
    let u = Field::from_fn_vec(g, 2, |t| vec![t.cos(), t.sin()]).unwrap();
    let lu = frac_laplacian_circle(&u, FracExponent::HALF).unwrap();
    for (a, b) in lu.samples().iter().zip(u.samples()) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn line_spectral_matches_poisson_oracle() {
    let g = Grid::Line(LineGrid::default());
    let f = Field::from_fn(g, |x| 1.0 / (1.0 + x * x)).unwrap().with_tail(TailModel::symmetric(2.0, 1.0));
    let l = frac_laplacian_line_spectral(&f, FracExponent::HALF).unwrap();
    let err = max_err_on(&l, |x| (1.0 - x * x) / (1.0 + x * x).powi(2), 10.0);
    assert!(err <= 1e-6, "{err}");
    // The image correction is what brings the error well below the bare periodisation error.
    assert!(err <= 1e-7, "{err}");
}

#[test]
fn line_constant_maps_to_zero() {
    let g = Grid::line(20.0, 256).unwrap();
    let c = Field::from_fn(g, |_| 1.5).unwrap().with_tail(TailModel::constant(1.5));
    assert!(frac_laplacian_line_spectral(&c, FracExponent::QUARTER).unwrap().max_abs() < 1e-12);
    let q = frac_laplacian_line_quadrature(&c, FracExponent::QUARTER, Convention::Paper).unwrap();
    assert!(q.max_abs() < 1e-9, "{}", q.max_abs());
}

#[test]
fn quadrature_matches_spectral_on_gaussian() {
    let g = Grid::line(20.0, 4096).unwrap();
    let f = Field::from_fn(g, |x| (-x * x).exp()).unwrap().with_tail(TailModel::zero());
    let spec = frac_laplacian_line_spectral(&f, FracExponent::QUARTER).unwrap();
    let quad = frac_laplacian_line_quadrature(&f, FracExponent::QUARTER, Convention::Normalized).unwrap();
    let err = spec.samples().iter().zip(quad.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-3, "{err}");
}

#[test]
fn quadrature_matches_half_laplacian_closed_form() {
    let g = Grid::line(200.0, 1 << 14).unwrap();
    let f = Field::from_fn(g, |x| 1.0 / (1.0 + x * x)).unwrap().with_tail(TailModel::symmetric(2.0, 1.0));
    let q = frac_laplacian_line_quadrature(&f, FracExponent::HALF, Convention::Normalized).unwrap();
    let err = max_err_on(&q, |x| (1.0 - x * x) / (1.0 + x * x).powi(2), 10.0);
    assert!(err <= 1e-5, "{err}");
}

#[test]
fn quadrature_requires_tail() {
    let f = Field::from_fn(Grid::line(5.0, 64).unwrap(), |x| (-x * x).exp()).unwrap();
    assert!(matches!(
        frac_laplacian_line_quadrature(&f, FracExponent::QUARTER, Convention::Paper),
        Err(Error::MissingTailModel(_))
    ));
    let f = f.with_tail(TailModel::zero());
    assert!(frac_laplacian_line_quadrature(&f, FracExponent::new(0.7).unwrap(), Convention::Paper).is_err());
}

#[test]
fn point_route_matches_field_route() {
    let g = Grid::line(20.0, 4096).unwrap();
    let f = Field::from_fn(g, |x| (-x * x).exp()).unwrap().with_tail(TailModel::zero());
    let quad = frac_laplacian_line_quadrature(&f, FracExponent::QUARTER, Convention::Paper).unwrap();
    for j in [1000, 2000, 2047, 2500] {
        let x = g.node(j);
        let p = frac_laplacian_point(|y: f64| (-y * y).exp(), x, FracExponent::QUARTER, Convention::Paper, &[]);
        assert!((p - quad.value(j, 0)).abs() < 1e-6, "x={x} {p} {}", quad.value(j, 0));
    }
}

#[test]
fn point_route_half_laplacian_closed_form() {
    for x in [0.0, 0.5, 3.0, 40.0] {
        let p = frac_laplacian_point(|y: f64| 1.0 / (1.0 + y * y), x, FracExponent::HALF, Convention::Normalized, &[]);
        let exact = (1.0 - x * x) / (1.0 + x * x).powi(2);
        assert!((p - exact).abs() < 1e-9 * exact.abs().max(1e-3), "x={x}: {p} vs {exact}");
    }
}

#[test]
fn riesz_examples() {
    let g = circle(64);
    let f = Field::from_fn(g, |t| (3.0 * t).cos()).unwrap();
    let r = riesz_transform(&f).unwrap();
    for j in 0..64 {
        assert!((r.value(j, 0) - (3.0 * g.node(j)).sin()).abs() < 1e-13);
    }
    let s = Field::from_fn(g, f64::sin).unwrap();
    let rr = riesz_transform(&riesz_transform(&s).unwrap()).unwrap();
    for (a, b) in rr.samples().iter().zip(s.samples()) {
        assert!((a + b).abs() < 1e-13);
    }

    let line = Grid::Line(LineGrid::default());
    let p = Field::from_fn(line, |x| 1.0 / (1.0 + x * x)).unwrap();
    let h = riesz_transform(&p).unwrap();
    let err = max_err_on(&h, |x| x / (1.0 + x * x), 10.0);
    assert!(err < 1e-4, "{err}");
}

#[test]
fn poisson_line_values() {
    let k = poisson_kernel_line(1.0, 0.0).unwrap();
    assert!((k.value - 1.0 / PI).abs() < 1e-16);
    assert!((k.dt + 1.0 / PI).abs() < 1e-16);
    assert_eq!(k.dx, 0.0);
    assert!(poisson_kernel_line(0.0, 1.0).is_err());
    // Normalisation: ∫ G(1, x) dx = 1 with the tail integrated exactly.
    let g = LineGrid::new(1e3, 1 << 16).unwrap();
    let window: f64 = g.nodes().iter().map(|&x| poisson_kernel_line(1.0, x).unwrap().value).sum::<f64>() * g.spacing();
    let tail = 2.0 * (0.5 - (1e3f64).atan() / PI);
    assert!((window + tail - 1.0).abs() < 1e-9, "{}", window + tail);
}

#[test]
fn poisson_semigroup() {
    let g = Grid::Line(LineGrid::default());
    let (t, s) = (0.7, 1.3);
    let gt = Field::from_fn(g, |x| poisson_kernel_line(t, x).unwrap().value).unwrap();
    let gs = Field::from_fn(g, |x| poisson_kernel_line(s, x).unwrap().value).unwrap();
    // Convolution through the spectrum: ĝ_t ĝ_s · 2L.
    let two_l = 2.0 * g.as_line().unwrap().half_width();
    let prod: Vec<Complex64> = gt.spectrum(0).iter().zip(gs.spectrum(0)).map(|(a, b)| a * b * two_l).collect();
    let conv = spectral::inverse_real(&prod);
    // The grid is cell-centred, so the circular convolution lands on shifted nodes.
    let n = g.n_points();
    let h = g.as_line().unwrap().spacing();
    let mut err: f64 = 0.0;
    for (j, v) in conv.iter().enumerate() {
        let x = -2.0 * g.as_line().unwrap().half_width() + (j as f64 + 1.0) * h;
        let x = if x < -two_l / 2.0 { x + two_l } else { x };
        if x.abs() <= 10.0 {
            err = err.max((v - poisson_kernel_line(t + s, x).unwrap().value).abs());
        }
    }
    assert!(err < 1e-6, "{err} (n={n})");
}

#[test]
fn poisson_circle_series_and_closed_form() {
    for t in [0.1, 1.0, 10.0] {
        let g = CircleGrid::with_points(512).unwrap();
        let total: f64 =
            g.nodes().iter().map(|&th| poisson_kernel_circle(t, th).unwrap().value).sum::<f64>() * g.spacing();
        assert!((total - 1.0).abs() < 1e-12, "t={t}: {total}");
    }
    let (t, th) = (1.0, PI / 3.0);
    let series = poisson_kernel_circle(t, th).unwrap();
    let closed = poisson_kernel_circle_closed_form(t, th).unwrap();
    assert!((series.value - closed.value / (2.0 * PI)).abs() < 1e-12);
    assert!((series.dt - closed.dt / (2.0 * PI)).abs() < 1e-12);
    assert!((series.dtheta - closed.dtheta / (2.0 * PI)).abs() < 1e-12);
    let m = poisson_kernel_circle(0.4, -0.9).unwrap();
    let p = poisson_kernel_circle(0.4, 0.9).unwrap();
    assert!((m.value - p.value).abs() < 1e-15);
    assert!(poisson_kernel_circle(-1.0, 0.0).is_err());
}

#[test]
fn inverse_quarter_examples() {
    let g = circle(64);
    let f = Field::from_fn(g, |t| (4.0 * t).cos()).unwrap();
    let i = inverse_quarter_laplacian(&f).unwrap();
    for j in 0..64 {
        assert!((i.value(j, 0) - 0.5 * (4.0 * g.node(j)).cos()).abs() < 1e-13);
    }
    let h = Field::from_fn(g, |t| (2.0 * t).sin() + (7.0 * t).cos().powi(3)).unwrap();
    let back = inverse_quarter_laplacian(&frac_laplacian_circle(&h, FracExponent::QUARTER).unwrap()).unwrap();
    for (a, b) in back.samples().iter().zip(h.samples()) {
        assert!((a - b).abs() < 1e-10);
    }
    let biased = Field::from_fn(g, |t| 1.0 + t.cos()).unwrap();
    assert!(inverse_quarter_laplacian(&biased).is_err());
}

#[test]
fn inverse_quarter_of_poisson_derivative() {
    // (-Δ)^{-1/4}[(x²-1)/(1+x²)²] = -(√π/2) Re (1+ix)^{-3/2}
    let g = Grid::Line(LineGrid::default());
    let f = Field::from_fn(g, |x| (x * x - 1.0) / (1.0 + x * x).powi(2)).unwrap();
    let i = inverse_quarter_laplacian(&f).unwrap();
    let exact = |x: f64| -0.5 * PI.sqrt() * Complex64::new(1.0, x).powf(-1.5).re;
    let err = max_err_on(&i, exact, 10.0);
    assert!(err < 1e-3, "{err}");
}

#[test]
fn homogeneity_of_quarter_laplacian() {
    let g = Grid::line(40.0, 8192).unwrap();
    let n = 3.0;
    let f = Field::from_fn(g, |x| (-x * x).exp()).unwrap().with_tail(TailModel::zero());
    let fn_ = Field::from_fn(g, |x| (-(n * x) * (n * x)).exp()).unwrap().with_tail(TailModel::zero());
    let lf = frac_laplacian_line_quadrature(&f, FracExponent::QUARTER, Convention::Paper).unwrap();
    let lfn = frac_laplacian_line_quadrature(&fn_, FracExponent::QUARTER, Convention::Paper).unwrap();
    for x in [-2.0, -0.3, 0.1, 1.7] {
        let j = ((x + 40.0) / g.as_line().unwrap().spacing()) as usize;
        let xj = g.node(j);
        let lhs = lfn.value(j, 0);
        let rhs = n.sqrt()
            * frac_laplacian_point(|y: f64| (-y * y).exp(), n * xj, FracExponent::QUARTER, Convention::Paper, &[]);
        assert!((lhs - rhs).abs() < 1e-3, "x={xj}: {lhs} vs {rhs}");
        let _ = lf.value(j, 0);
    }
}

proptest! {
    #[test]
    fn spectral_route_preserves_parity(vals in proptest::collection::vec(-1.0f64..1.0, 64)) {
        let f = Field::new(circle(64), 1, vals).unwrap();
        let e = crate::geometry::even_part(&f);
        let o = crate::geometry::odd_part(&f);
        let s = FracExponent::new(0.37).unwrap();
        let le = frac_laplacian_circle(&e, s).unwrap();
        let lo = frac_laplacian_circle(&o, s).unwrap();
        prop_assert!(crate::geometry::odd_part(&le).max_abs() < 1e-12);
        prop_assert!(crate::geometry::even_part(&lo).max_abs() < 1e-12);
    }

    #[test]
    fn riesz_commutes_and_squares(vals in proptest::collection::vec(-1.0f64..1.0, 32)) {
        let mut f = Field::new(circle(32), 1, vals).unwrap();
        let mean = f.spectrum(0)[0].re;
        f = f.with_samples(f.samples().iter().map(|v| v - mean).collect()).unwrap();
        let s = FracExponent::QUARTER;
        let a = riesz_transform(&frac_laplacian_circle(&f, s).unwrap()).unwrap();
        let b = frac_laplacian_circle(&riesz_transform(&f).unwrap(), s).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let rr = riesz_transform(&riesz_transform(&f).unwrap()).unwrap();
        // The Nyquist mode is annihilated by ℛ, so compare after removing it.
        let ny = f.spectrum(0)[16].re;
        for (j, (x, y)) in rr.samples().iter().zip(f.samples()).enumerate() {
            let nyq = ny * if j % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((x + y - nyq).abs() < 1e-12);
        }
    }
}

#[test]
fn image_sum_closed_form_matches_series() {
    let period: f64 = 200.0;
    let at_zero = std::f64::consts::PI.powi(2) / (3.0 * period * period);
    assert!((super::image_sum(0.0, 100.0, 2.0) - at_zero).abs() <= 1e-15 * at_zero);
    for x in [0.0, 1e-3, 0.3, 7.5, 42.0, 99.9] {
        let closed = super::image_sum(x, 100.0, 2.0);
        let series = super::image_sum(x, 100.0, 2.0 + 1e-12);
        assert!((closed - series).abs() <= 1e-7 * closed, "x = {x}: {closed} vs {series}");
    }
}

use super::*;
use proptest::prelude::*;

fn line(n: usize) -> Grid {
    Grid::line(10.0, n).unwrap()
}

#[test]
fn grid_validation() {
    assert!(LineGrid::new(1.0, 6).is_err());
    assert!(LineGrid::new(1.0, 9).is_err());
    assert!(LineGrid::new(-1.0, 8).is_err());
    assert!(CircleGrid::with_points(7).is_err());
    assert!(FracExponent::new(0.0).is_err());
    assert!(FracExponent::new(1.5).is_err());
    assert_eq!(FracExponent::QUARTER.value(), 0.25);
}

#[test]
fn line_nodes_are_cell_centred_and_symmetric() {
    let g = LineGrid::new(2.0, 16).unwrap();
    assert!((g.node(0) + 2.0 - g.spacing() / 2.0).abs() < 1e-15);
    for j in 0..16 {
        assert!(g.node(j) != 0.0);
        assert!((g.node(j) + g.node(15 - j)).abs() < 1e-14);
    }
}

#[test]
fn parity_examples() {
    let g = line(64);
    let x = Field::from_fn(g, |x| x).unwrap();
    assert!(even_part(&x).max_abs() < 1e-15);
    assert_eq!(odd_part(&x).samples(), x.samples());

    let p = Field::from_fn(g, |x| x + x * x).unwrap();
    let e = even_part(&p);
    let o = odd_part(&p);
    for j in 0..64 {
        let xj = g.node(j);
        assert!((e.value(j, 0) - xj * xj).abs() < 1e-12);
        assert!((o.value(j, 0) - xj).abs() < 1e-12);
    }

    let c = Grid::circle(32).unwrap();
    let cos = Field::from_fn(c, f64::cos).unwrap();
    let ec = even_part(&cos);
    for j in 0..32 {
        assert!((ec.value(j, 0) - cos.value(j, 0)).abs() < 1e-15);
    }
}

#[test]
fn circle_trapezoid_kills_nonzero_modes() {
    let c = Grid::circle(64).unwrap();
    for k in 1..64 {
        let re = Field::from_fn(c, |t| (k as f64 * t).cos()).unwrap().integral(0);
        let im = Field::from_fn(c, |t| (k as f64 * t).sin()).unwrap().integral(0);
        assert!(re.abs() < 1e-12 && im.abs() < 1e-12, "k={k}");
    }
}

#[test]
fn resample_circle_band_limited() {
    let f = Field::from_fn(Grid::circle(64).unwrap(), |t| (3.0 * t).cos()).unwrap();
    let target = Grid::circle(256).unwrap();
    let g = resample(&f, &target).unwrap();
    for j in 0..256 {
        assert!((g.value(j, 0) - (3.0 * target.node(j)).cos()).abs() < 1e-12);
    }
}

#[test]
fn resample_downsampling_reports_aliasing() {
    let f = Field::from_fn(Grid::circle(64).unwrap(), |t| (20.0 * t).cos()).unwrap();
    assert!(matches!(resample(&f, &Grid::circle(16).unwrap()), Err(Error::Aliasing(_))));
    let ok = Field::from_fn(Grid::circle(64).unwrap(), |t| (2.0 * t).sin()).unwrap();
    assert!(resample(&ok, &Grid::circle(16).unwrap()).is_ok());
}

#[test]
fn resample_constant() {
    let f = Field::from_fn(line(64), |_| 2.5).unwrap();
    let g = resample(&f, &Grid::line(10.0, 200).unwrap()).unwrap();
    assert!(g.samples().iter().all(|v| (v - 2.5).abs() < 1e-13));
    let c = Field::from_fn(Grid::circle(32).unwrap(), |_| -1.0).unwrap();
    let d = resample(&c, &Grid::circle(128).unwrap()).unwrap();
    assert!(d.samples().iter().all(|v| (v + 1.0).abs() < 1e-13));
}

#[test]
fn resample_gaussian_line() {
    let f = Field::from_fn(line(512), |x| (-x * x).exp()).unwrap();
    let target = line(1024);
    let g = resample(&f, &target).unwrap();
    let err = (0..1024).map(|j| (g.value(j, 0) - (-target.node(j).powi(2)).exp()).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn resample_line_needs_tail_beyond_window() {
    let f = Field::from_fn(line(64), |x| 1.0 / (1.0 + x * x)).unwrap();
    let wide = Grid::line(20.0, 128).unwrap();
    assert!(matches!(resample(&f, &wide), Err(Error::MissingTailModel(_))));
    let f = f.with_tail(TailModel::symmetric(2.0, 1.0));
    let g = resample(&f, &wide).unwrap();
    assert!((g.value(0, 0) - 1.0 / wide.node(0).powi(2)).abs() < 1e-12);
}

#[test]
fn spectrum_roundtrip_and_symmetry() {
    let f =
        Field::from_fn_vec(Grid::circle(128).unwrap(), 2, |t: f64| vec![t.cos() + 0.3, (2.0 * t).sin().exp()]).unwrap();
    let spectra = f.spectra().to_vec();
    for s in &spectra {
        let n = s.len();
        for k in 1..n {
            assert!((s[k] - s[n - k].conj()).norm() < 1e-14);
        }
    }
    let back = Field::from_spectrum(*f.grid(), spectra).unwrap();
    for (a, b) in f.samples().iter().zip(back.samples()) {
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn csv_and_binary_roundtrip() {
    let f = Field::from_fn_vec(line(16), 2, |x| vec![x.sin(), x * 1e-7]).unwrap();
    let mut buf = Vec::new();
    write_csv(&f, &mut buf).unwrap();
    let g = read_csv(&buf[..]).unwrap();
    assert_eq!(g.grid(), f.grid());
    assert_eq!(g.samples(), f.samples());

    let mut bin = Vec::new();
    write_binary(&f, &mut bin).unwrap();
    assert_eq!(bin.len(), 4 + 1 + 8 + 8 + 8 + 16 * 2 * 8);
    let h = read_binary(&bin[..]).unwrap();
    assert_eq!(h.samples(), f.samples());
    assert!(read_binary(&b"XXXX"[..]).is_err());
}

#[test]
fn circle_point_interpolation() {
    let g = Grid::circle(64).unwrap();
    let f = Field::from_fn(g, |t| (2.0 * t).cos()).unwrap();
    let t: f64 = 0.123;
    let exact = (2.0f64 * t).cos();
    assert!((f.eval(0, t, Interpolation::BandLimited).unwrap() - exact).abs() < 1e-13);
    assert!((f.eval(0, t, Interpolation::Lagrange).unwrap() - exact).abs() < 1e-7);
    assert!((f.eval(0, t, Interpolation::MonotoneCubic).unwrap() - exact).abs() < 5e-3);
}

proptest! {
    #[test]
    fn parity_decomposition_is_exact(vals in proptest::collection::vec(-1e3f64..1e3, 32)) {
        let f = Field::new(line(32), 1, vals).unwrap();
        let e = even_part(&f);
        let o = odd_part(&f);
        for j in 0..32 {
            prop_assert!((e.value(j, 0) + o.value(j, 0) - f.value(j, 0)).abs() <= 1e-12 * f.value(j, 0).abs().max(1.0));
        }
        let ee = even_part(&e);
        prop_assert_eq!(ee.samples(), e.samples());
        let pairing = e.inner(&o).unwrap();
        let scale = f.inner(&f).unwrap().max(1.0);
        prop_assert!(pairing.abs() <= 1e-12 * scale);
    }

    #[test]
    fn circle_parity_pairing(vals in proptest::collection::vec(-10f64..10.0, 16)) {
        let f = Field::new(Grid::circle(16).unwrap(), 1, vals).unwrap();
        let e = even_part(&f);
        let o = odd_part(&f);
        prop_assert!(e.inner(&o).unwrap().abs() < 1e-12 * f.inner(&f).unwrap().max(1.0));
        for j in 0..16 {
            prop_assert!((e.value(j, 0) - e.value(f.grid().reflect(j), 0)).abs() < 1e-15);
        }
    }
}

//! Cross-module checks through the public API.

use std::f64::consts::PI;

use fraclap_core::commutators::op_s;
use fraclap_core::commutators::oracle::{self, TrigPoly};
use fraclap_core::fracops::{frac_laplacian, riesz_transform};
use fraclap_core::geometry::{read_binary, read_csv, write_binary, write_csv, Interpolation};
use fraclap_core::halfharmonic::{el_residual, energy, identity_map, max_norm, mobius_compose};
use fraclap_core::norms::{lorentz_21, lorentz_2inf, lp_norm, sobolev_half_seminorm, Region};
use fraclap_core::pohozaev::residual_circle;
use fraclap_core::stereo::{pullback, pushforward};
use fraclap_core::{Field, FracExponent, Grid, LineGrid, SphereDistribution, TailModel};
use proptest::prelude::*;

fn trig(coeffs: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |t| coeffs.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * t + 0.3 * k as f64).cos()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn half_laplacian_composes_from_quarters(coeffs in prop::collection::vec(-1.0f64..1.0, 1..12)) {
        let f = Field::from_fn(Grid::circle(128).unwrap(), trig(&coeffs)).unwrap();
        let half = frac_laplacian(&f, FracExponent::HALF).unwrap();
        let quarter = FracExponent::QUARTER;
        let twice = frac_laplacian(&frac_laplacian(&f, quarter).unwrap(), quarter).unwrap();
        let diff = half.linear_combination(1.0, &twice, -1.0).unwrap().max_abs();
        prop_assert!(diff <= 1e-12 * (1.0 + half.max_abs()));
    }

    #[test]
    fn riesz_squared_is_minus_identity_on_mean_zero(coeffs in prop::collection::vec(-1.0f64..1.0, 1..12)) {
        let f = Field::from_fn(Grid::circle(128).unwrap(), trig(&coeffs)).unwrap();
        let rr = riesz_transform(&riesz_transform(&f).unwrap()).unwrap();
        prop_assert!(rr.linear_combination(1.0, &f, 1.0).unwrap().max_abs() <= 1e-13);
    }

    #[test]
    fn energy_is_twice_pi_times_weighted_coefficients(coeffs in prop::collection::vec(-1.0f64..1.0, 1..12)) {
        let f = Field::from_fn(Grid::circle(128).unwrap(), trig(&coeffs)).unwrap();
        let exact: f64 = coeffs.iter().enumerate().map(|(k, c)| PI * (k + 1) as f64 * c * c).sum();
        let e = sobolev_half_seminorm(&f).unwrap().powi(2);
        prop_assert!((e - exact).abs() <= 1e-10 * (1.0 + exact));
    }

    #[test]
    fn lorentz_norms_bracket_l2(mut values in prop::collection::vec(-5.0f64..5.0, 16..64)) {
        values.truncate(values.len() & !1);
        let f = Field::new(Grid::line(1.0, values.len()).unwrap(), 1, values).unwrap();
        let l2 = lp_norm(&f, 2.0, &Region::All).unwrap();
        let weak = lorentz_2inf(&f, &Region::All).unwrap();
        let strong = lorentz_21(&f, &Region::All).unwrap();
        prop_assert!(weak <= l2 * (1.0 + 1e-12));
        prop_assert!(l2 <= strong * (1.0 + 1e-12));
    }

    #[test]
    fn s_operator_matches_oracle(a in -1.0f64..1.0, b in -1.0f64..1.0, k in 1i64..6) {
        let q = TrigPoly::cos(1).add(&TrigPoly::sin(k), a);
        let v = TrigPoly::sin(2).add(&TrigPoly::cos(k + 1), b);
        let grid = Grid::circle(64).unwrap();
        let got = op_s(&q.sample(grid).unwrap(), &v.sample(grid).unwrap()).unwrap();
        let exact = oracle::s(&q, &v);
        for j in 0..64 {
            prop_assert!((got.value(j, 0) - exact.eval(grid.node(j))).abs() <= 1e-10);
        }
    }
}

#[test]
fn field_files_round_trip() {
    let f = Field::from_fn_vec(Grid::line(5.0, 64).unwrap(), 2, |x| vec![x.sin(), (-x * x).exp()]).unwrap();
    let mut csv = Vec::new();
    write_csv(&f, &mut csv).unwrap();
    let back = read_csv(csv.as_slice()).unwrap();
    assert_eq!(back.grid(), f.grid());
    assert!(back.linear_combination(1.0, &f, -1.0).unwrap().max_abs() < 1e-15);

    let mut bin = Vec::new();
    write_binary(&f, &mut bin).unwrap();
    assert_eq!(read_binary(bin.as_slice()).unwrap().samples(), f.samples());
}

#[test]
fn stereographic_round_trip() {
    let lg = LineGrid::new(50.0, 2048).unwrap();
    let u = Field::from_fn(Grid::Line(lg), |x| 1.0 / (1.0 + x * x)).unwrap().with_tail(TailModel::symmetric(2.0, 1.0));
    let v = pushforward(&u, &Grid::circle(512).unwrap()).unwrap();
    let w = pullback(&v, &lg, Interpolation::Lagrange).unwrap();
    let window = Region::interval(-10.0, 10.0).unwrap();
    let diff = w.linear_combination(1.0, &u, -1.0).unwrap();
    assert!(lp_norm(&diff, f64::INFINITY, &window).unwrap() < 1e-6);
}

#[test]
fn mobius_orbit_of_the_identity_stays_critical() {
    let s = SphereDistribution::new(2).unwrap();
    let id = identity_map(64).unwrap();
    for a in [0.2, 0.5, 0.8] {
        let v = mobius_compose(&id, a).unwrap();
        assert!((energy(&v).unwrap() - 2.0 * PI).abs() < 1e-6);
        assert!(max_norm(&el_residual(&v, &s).unwrap()) < 1e-6);
        let r = residual_circle(&v).unwrap();
        assert!(r.modes.norm_gap < 1e-10 && r.modes.dot < 1e-10);
    }
}

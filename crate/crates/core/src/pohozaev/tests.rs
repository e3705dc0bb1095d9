use super::*;
use num_complex::Complex64;

use crate::geometry::LineGrid;

fn identity_circle(n: usize) -> Field {
    Field::from_fn_vec(Grid::circle(n).unwrap(), 2, |t| vec![t.cos(), t.sin()]).unwrap()
}

#[test]
fn line_identity_for_inverse_stereographic_map() {
    let u = inverse_stereographic_field(Grid::Line(LineGrid::default())).unwrap();
    let ts = [0.5, 1.0, 2.0, 5.0];
    let r = residual_line(&u, &ts).unwrap();
    for (k, &t) in ts.iter().enumerate() {
        let exact = 4.0 * PI * PI / (t + 1.0).powi(4);
        assert!(relative(r.lhs[k], exact) < 1e-6, "t={t}: {} vs {exact}", r.lhs[k]);
        assert!(relative(r.rhs[k], exact) < 1e-6, "t={t}: {} vs {exact}", r.rhs[k]);
        let q = 2.0 * PI / (t + 1.0).powi(2);
        assert!(r.lhs_vectors[k][0].abs() < 1e-6 && (r.lhs_vectors[k][1] + q).abs() < 1e-6);
        assert!((r.rhs_vectors[k][0] - q).abs() < 1e-6 && r.rhs_vectors[k][1].abs() < 1e-6);
    }
    assert!((r.lhs[1] - PI * PI / 4.0).abs() < 1e-5);
    assert!(r.hypothesis_residual < 1e-4, "{}", r.hypothesis_residual);
}

#[test]
fn line_identity_constant_and_perturbed() {
    let g = Grid::line(100.0, 1 << 13).unwrap();
    let c = Field::from_fn(g, |_| 3.0).unwrap().with_tail(TailModel::constant(3.0));
    let r = residual_line(&c, &[1.0]).unwrap();
    assert!(r.lhs[0] < 1e-20 && r.rhs[0] < 1e-20);

    let base = inverse_stereographic_field(g).unwrap();
    let bumped = Field::from_fn_vec(g, 2, |x| {
        let (a, b) = crate::stereo::unproject(x);
        vec![a + 0.3 * (-(x - 0.7).powi(2)).exp(), b]
    })
    .unwrap()
    .with_tails(base.tails().unwrap().to_vec())
    .unwrap();
    let p = residual_line(&bumped, &[1.0]).unwrap();
    let clean = residual_line(&base, &[1.0]).unwrap();
    assert!(p.relative_residual[0] > 1e-2, "{}", p.relative_residual[0]);
    assert!(p.hypothesis_residual > 1e-2 && p.hypothesis_residual > 100.0 * clean.hypothesis_residual);
    assert!(residual_line(&base.clone().without_tail(), &[1.0]).is_err());
}

#[test]
fn circle_modes() {
    let r = residual_circle(&identity_circle(256)).unwrap();
    assert!((r.modes.u1[0] - 0.5).abs() < 1e-14 && r.modes.u1[1].abs() < 1e-14);
    assert!(r.modes.u_minus1[0].abs() < 1e-14 && (r.modes.u_minus1[1] - 0.5).abs() < 1e-14);
    assert!(r.modes.norm_gap < 1e-14 && r.modes.dot < 1e-14);
    assert!(r.identity.max_relative_residual() < 1e-12);
    assert!(r.identity.hypothesis_residual < 1e-12);

    let c = Field::from_fn_vec(Grid::circle(64).unwrap(), 2, |_| vec![1.0, -2.0]).unwrap();
    let rc = residual_circle(&c).unwrap();
    assert!(rc.modes.u1.iter().chain(&rc.modes.u_minus1).all(|v| v.abs() < 1e-15));

    let d2 = Field::from_fn_vec(Grid::circle(64).unwrap(), 2, |t| vec![(2.0 * t).cos(), (2.0 * t).sin()]).unwrap();
    let r2 = residual_circle(&d2).unwrap();
    assert!(r2.modes.u1.iter().chain(&r2.modes.u_minus1).all(|v| v.abs() < 1e-15));
}

#[test]
fn circle_modes_rotation_stability() {
    let g = Grid::circle(256).unwrap();
    // Boundary values of z ↦ (z + a)/(1 + a z), a = 0.4.
    let base = Field::from_fn_vec(g, 2, |t| {
        let z = Complex64::from_polar(1.0, t);
        let w = (z + 0.4) / (1.0 + 0.4 * z);
        vec![w.re, w.im]
    })
    .unwrap();
    let r0 = residual_circle(&base).unwrap();
    let pair0 = {
        let n = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut p = [n(&r0.modes.u1), n(&r0.modes.u_minus1)];
        p.sort_by(f64::total_cmp);
        p
    };
    for alpha in [0.3, 1.1, 2.5] {
        // Rotating the argument: u(θ + α), evaluated band-limited.
        let rot = Field::from_fn_vec(g, 2, |t| {
            (0..2).map(|c| base.eval(c, t + alpha, crate::geometry::Interpolation::BandLimited).unwrap()).collect()
        })
        .unwrap();
        let r = residual_circle(&rot).unwrap();
        let n = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut p = [n(&r.modes.u1), n(&r.modes.u_minus1)];
        p.sort_by(f64::total_cmp);
        assert!((p[0] - pair0[0]).abs() < 1e-10 && (p[1] - pair0[1]).abs() < 1e-10);
    }
}

#[test]
fn circle_t_identity() {
    let u = identity_circle(512);
    let ts = [0.1, 0.5, 1.0, 3.0, 8.0];
    let r = residual_circle_t(&u, &ts).unwrap();
    for (k, &t) in ts.iter().enumerate() {
        assert!(relative(r.lhs[k], r.rhs[k]) < 1e-10);
        assert!(relative(r.lhs[k], (-2.0 * t).exp()) < 1e-10, "t={t}: {}", r.lhs[k]);
    }
    let c = Field::from_fn(Grid::circle(64).unwrap(), |_| 1.0).unwrap();
    let rc = residual_circle_t(&c, &[1.0]).unwrap();
    assert!(rc.lhs[0] < 1e-28 && rc.rhs[0] < 1e-28);
    assert!(residual_circle_t(&c, &[0.0]).is_err());
}

#[test]
fn plane_identity() {
    let id = PlaneField::from_fn(8.0, 257, 2, |x, y| vec![x, y]).unwrap();
    let r = residual_plane(&id, (0.0, 0.0), &[1.0]).unwrap();
    assert!(r.max_relative_residual() <= 1e-6);
    let z2 = PlaneField::from_fn(8.0, 257, 2, |x, y| vec![x * x - y * y, 2.0 * x * y]).unwrap();
    let r = residual_plane(&z2, (0.0, 0.0), &[1.0]).unwrap();
    assert!(r.max_relative_residual() <= 1e-4);
    assert!(r.hypothesis_residual < 1e-8);
    let bad = PlaneField::from_fn(8.0, 129, 2, |x, _| vec![x * x, 0.0]).unwrap();
    let r = residual_plane(&bad, (0.0, 0.0), &[1.0]).unwrap();
    assert!(r.hypothesis_residual > 1.0);
    assert!(residual_plane(&id, (0.0, 0.0), &[4.0]).is_err());
}

#[test]
fn m_kernels_and_parity() {
    assert!((m_plus_kernel(0.0) - PI.sqrt()).abs() < 1e-15);
    assert_eq!(m_minus_kernel(0.0), 0.0);
    let g = LineGrid::new(20.0, 2048).unwrap();
    let w = Field::from_fn(Grid::Line(g), |x| (-x * x).exp()).unwrap().with_tail(TailModel::zero());
    let mp = m_plus(&w, &g).unwrap();
    assert!(crate::geometry::odd_part(&mp).max_abs() <= 1e-12 * mp.max_abs());
    let wo = Field::from_fn(Grid::Line(g), |x| x * (-x * x).exp()).unwrap().with_tail(TailModel::zero());
    let mm = m_minus(&wo, &g).unwrap();
    assert!(crate::geometry::even_part(&mm).max_abs() <= 1e-12 * mm.max_abs());
    // Grid route against the closure route.
    for j in [0, 700, 1023, 1500] {
        let t = g.node(j);
        let c = m_plus_of(|y| (-y * y).exp(), t);
        assert!((mp.value(j, 0) - c).abs() < 1e-9, "t={t}: {} vs {c}", mp.value(j, 0));
    }
}

#[test]
fn kernel_transforms() {
    let r = kernel_transform_check(&LineGrid::default(), 10.0).unwrap();
    assert!(r.plus_vs_exact < 1e-3 && r.minus_vs_exact < 1e-3, "{r:?}");
    assert!(r.plus_vs_kernel > 0.5, "{r:?}");
}

#[test]
fn adjoint_pairings() {
    let g = LineGrid::new(12.0, 1024).unwrap();
    let w = Field::from_fn(Grid::Line(g), |x| (-x * x).exp()).unwrap().with_tail(TailModel::zero());
    let r = m_adjoint_check(&w, &w, &g).unwrap();
    assert!(r.relative < 1e-3, "{r:?}");
    let odd = Field::from_fn(Grid::Line(g), |x| x * (-x * x).exp()).unwrap().with_tail(TailModel::zero());
    let r = m_adjoint_check(&w, &odd, &g).unwrap();
    assert!(r.direct.abs() < 1e-10 && r.transformed.abs() < 1e-10, "{r:?}");
}

#[test]
fn even_subspace_is_injective() {
    let s = even_subspace_matrix(64).unwrap();
    assert!(s.sigma_min > 0.0 && s.condition.is_finite(), "{s:?}");
}

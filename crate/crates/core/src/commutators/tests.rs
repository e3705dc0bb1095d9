use super::*;
use proptest::prelude::*;

use super::oracle::{self, TrigPoly as Poly};

fn circle(n: usize) -> Grid {
    Grid::circle(n).unwrap()
}

fn cos(k: i64) -> Poly {
    Poly::cos(k)
}

fn sin(k: i64) -> Poly {
    Poly::sin(k)
}

fn add(a: &Poly, b: &Poly, s: f64) -> Poly {
    a.add(b, s)
}

fn field(g: Grid, p: &Poly) -> Field {
    p.sample(g).unwrap()
}

fn assert_matches(f: &Field, p: &Poly, tol: f64) {
    let exact = field(*f.grid(), p);
    for (a, b) in f.samples().iter().zip(exact.samples()) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }
}

use oracle::{f as f_oracle, lambda as lambda_oracle, s as s_oracle, t as t_oracle};

#[test]
fn operators_match_convolution_oracle() {
    let g = circle(64);
    let cases = [
        (cos(1), cos(1)),
        (cos(1), sin(2)),
        (cos(1), sin(1)),
        (add(&cos(3), &sin(5), 0.7), add(&sin(2), &cos(9), -1.3)),
    ];
    for (q, v) in &cases {
        let (qf, vf) = (field(g, q), field(g, v));
        assert_matches(&op_t(&qf, &vf).unwrap(), &t_oracle(q, v), 1e-10);
        assert_matches(&op_s(&qf, &vf).unwrap(), &s_oracle(q, v), 1e-10);
        assert_matches(&op_f(&qf, &vf).unwrap(), &f_oracle(q, v), 1e-10);
        assert_matches(&op_lambda(&qf, &vf).unwrap(), &lambda_oracle(q, v), 1e-10);
    }
}

#[test]
fn f_of_cosines_is_minus_cos_2theta() {
    let g = circle(32);
    let c = Field::from_fn(g, f64::cos).unwrap();
    let f = op_f(&c, &c).unwrap();
    for j in 0..32 {
        assert!((f.value(j, 0) + (2.0 * g.node(j)).cos()).abs() < 1e-13);
    }
}

#[test]
fn degenerate_constant_q() {
    let g = circle(64);
    let q = Field::from_fn(g, |_| 2.5).unwrap();
    let v = Field::from_fn(g, |t| (3.0 * t).sin() + (t).cos().powi(3) - 0.0).unwrap();
    assert!(op_t(&q, &v).unwrap().max_abs() < 1e-12);
    assert!(op_lambda(&q, &v).unwrap().max_abs() < 1e-12);
    // With ℛ = -i sign(ξ), S(1, v) = 2 (-Δ)^{1/4} v.
    let one = Field::from_fn(g, |_| 1.0).unwrap();
    let s = op_s(&one, &v).unwrap();
    let lv = quarter(&v).unwrap();
    for (a, b) in s.samples().iter().zip(lv.samples()) {
        assert!((a - 2.0 * b).abs() < 1e-12);
    }
}

#[test]
fn matrix_q_acts_componentwise() {
    let g = circle(32);
    // Antisymmetric Q = [[0, w], [-w, 0]].
    let q = Field::from_fn_vec(g, 4, |t| vec![0.0, t.cos(), -t.cos(), 0.0]).unwrap();
    let v = Field::from_fn_vec(g, 2, |t| vec![t.sin(), (2.0 * t).cos()]).unwrap();
    let p = product(&q, &v).unwrap();
    for j in 0..32 {
        let t = g.node(j);
        assert!((p.value(j, 0) - t.cos() * (2.0 * t).cos()).abs() < 1e-13);
        assert!((p.value(j, 1) + t.cos() * t.sin()).abs() < 1e-13);
    }
    let bad = Field::from_fn_vec(g, 3, |_| vec![0.0; 3]).unwrap();
    assert!(matches!(product(&bad, &v), Err(Error::ShapeMismatch(_))));
    assert!(op_t(&q, &v).is_ok());
}

#[test]
fn compensation_ratio_is_bounded_across_resolutions() {
    use rand::{Rng, SeedableRng};
    let mut ratios = Vec::new();
    for p in 9..=13 {
        let n = 1usize << p;
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let g = circle(n);
        let modes = 64;
        let qa: Vec<(f64, f64)> =
            (1..=modes).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let va: Vec<(f64, f64)> =
            (1..=modes).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let build = |a: &[(f64, f64)], decay: f64| {
            Field::from_fn(g, |t| {
                a.iter()
                    .enumerate()
                    .map(|(k, (x, y))| {
                        let kf = (k + 1) as f64;
                        (x * (kf * t).cos() + y * (kf * t).sin()) * kf.powf(-decay)
                    })
                    .sum()
            })
            .unwrap()
        };
        let q = build(&qa, 1.0);
        let v = build(&va, 0.5);
        ratios.push(compensation_ratio(&q, &v).unwrap());
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max.is_finite() && max / min < 1.01, "{ratios:?}");
}

proptest! {
    #[test]
    fn bilinearity(a in proptest::collection::vec(-1.0f64..1.0, 32),
                   b in proptest::collection::vec(-1.0f64..1.0, 32),
                   c in proptest::collection::vec(-1.0f64..1.0, 32),
                   x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let g = circle(32);
        let q1 = Field::new(g, 1, a).unwrap();
        let q2 = Field::new(g, 1, b).unwrap();
        let v = Field::new(g, 1, c).unwrap();
        let q = q1.linear_combination(x, &q2, y).unwrap();
        type Op = fn(&Field, &Field) -> Result<Field>;
        let ops: [Op; 4] = [op_t, op_s, op_f, op_lambda];
        for op in ops {
            let lhs = op(&q, &v).unwrap();
            let rhs = op(&q1, &v).unwrap().linear_combination(x, &op(&q2, &v).unwrap(), y).unwrap();
            for (l, r) in lhs.samples().iter().zip(rhs.samples()) {
                prop_assert!((l - r).abs() < 1e-12);
            }
            let lv = op(&q1, &q.linear_combination(1.0, &v, x).unwrap()).unwrap();
            let rv = op(&q1, &q).unwrap().linear_combination(1.0, &op(&q1, &v).unwrap(), x).unwrap();
            for (l, r) in lv.samples().iter().zip(rv.samples()) {
                prop_assert!((l - r).abs() < 1e-12);
            }
        }
    }
}

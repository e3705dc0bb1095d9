use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fraclap_core::commutators::op_t;
use fraclap_core::fracops::{frac_laplacian, frac_laplacian_line_quadrature};
use fraclap_core::halfharmonic::{energy, identity_map, mobius_compose};
use fraclap_core::norms::{self, Region};
use fraclap_core::pohozaev::residual_circle;
use fraclap_core::{Convention, Field, FracExponent, Grid, LineGrid, TailModel};

fn lorentzian(n: usize) -> Field {
    Field::from_fn(Grid::Line(LineGrid::new(100.0, n).unwrap()), |x| 1.0 / (1.0 + x * x))
        .unwrap()
        .with_tail(TailModel::symmetric(2.0, 1.0))
}

fn half_laplacian(c: &mut Criterion) {
    let mut g = c.benchmark_group("half_laplacian");
    for n in [1 << 10, 1 << 14] {
        let circle = Field::from_fn(Grid::circle(n).unwrap(), |t| (3.0 * t).cos() + (7.0 * t).sin()).unwrap();
        g.bench_with_input(BenchmarkId::new("circle_spectral", n), &circle, |b, f| {
            b.iter(|| frac_laplacian(black_box(f), FracExponent::HALF).unwrap())
        });
        let line = lorentzian(n);
        g.bench_with_input(BenchmarkId::new("line_spectral", n), &line, |b, f| {
            b.iter(|| frac_laplacian(black_box(f), FracExponent::HALF).unwrap())
        });
    }
    let line = lorentzian(1 << 11);
    g.bench_function("line_quadrature/2048", |b| {
        b.iter(|| frac_laplacian_line_quadrature(black_box(&line), FracExponent::HALF, Convention::Normalized).unwrap())
    });
    g.finish();
}

fn commutator(c: &mut Criterion) {
    let grid = Grid::circle(1 << 12).unwrap();
    let q = Field::from_fn(grid, |t| t.cos() + 0.3 * (5.0 * t).sin()).unwrap();
    let v = Field::from_fn(grid, |t| (2.0 * t).sin() - 0.2 * (9.0 * t).cos()).unwrap();
    c.bench_function("op_t/4096", |b| b.iter(|| op_t(black_box(&q), black_box(&v)).unwrap()));
}

fn norms_and_identities(c: &mut Criterion) {
    let f = lorentzian(1 << 16);
    let region = Region::annulus(0.0, 1.0, 50.0).unwrap();
    c.bench_function("norm_report/65536", |b| b.iter(|| norms::report(black_box(&f), &region).unwrap()));

    let id = identity_map(256).unwrap();
    c.bench_function("residual_circle/256", |b| b.iter(|| residual_circle(black_box(&id)).unwrap()));
    c.bench_function("mobius_energy/a=0.9", |b| {
        b.iter(|| energy(&mobius_compose(black_box(&id), 0.9).unwrap()).unwrap())
    });
}

criterion_group!(benches, half_laplacian, commutator, norms_and_identities);
criterion_main!(benches);

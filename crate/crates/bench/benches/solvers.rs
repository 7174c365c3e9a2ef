//! Criterion benchmarks for the solver pipeline: radial shooting,
//! meshing, discrete eigen/torsion solves, and web-chain verification.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shellspec_core::{
    build_web_field, match_shell, maximize_torsion, minimize_eigen, solve_radial_eigen,
    solve_radial_torsion, triangulate, verify_eigen_chain, ConvexPolygon, DomainSpec, Point2,
    ShellSpec, SimplePolygon,
};

fn square(half: f64) -> Vec<Point2> {
    vec![
        Point2::new(-half, -half),
        Point2::new(half, -half),
        Point2::new(half, half),
        Point2::new(-half, half),
    ]
}

fn square_domain() -> DomainSpec {
    let outer = SimplePolygon::new(square(2.0)).unwrap();
    let hole = ConvexPolygon::new(square(0.5)).unwrap();
    DomainSpec::new(outer, hole).unwrap()
}

fn bench_radial(c: &mut Criterion) {
    let shell = ShellSpec::new(2, 1.0, 2.0).unwrap();
    let mut group = c.benchmark_group("radial");
    for p in [1.5, 2.0, 3.0] {
        group.bench_with_input(BenchmarkId::new("eigen", p), &p, |b, &p| {
            b.iter(|| solve_radial_eigen(&shell, p, 1.0, 1e-8).unwrap().lambda)
        });
        group.bench_with_input(BenchmarkId::new("torsion", p), &p, |b, &p| {
            b.iter(|| solve_radial_torsion(&shell, p, 1.0).unwrap().t)
        });
    }
    group.finish();
}

fn bench_mesh(c: &mut Criterion) {
    let dom = square_domain();
    let mut group = c.benchmark_group("mesh");
    for h in [0.1, 0.05] {
        group.bench_with_input(BenchmarkId::new("triangulate", h), &h, |b, &h| {
            b.iter(|| triangulate(&dom, h).unwrap().triangles.len())
        });
    }
    group.finish();
}

fn bench_fem(c: &mut Criterion) {
    let dom = square_domain();
    let mesh = triangulate(&dom, 0.05).unwrap();
    let mut group = c.benchmark_group("fem");
    group.sample_size(10);
    group.bench_function("eigen_p2", |b| {
        b.iter(|| minimize_eigen(&mesh, 2.0, 1.0, 2.0, 1e-8).unwrap().lambda)
    });
    group.bench_function("eigen_p1_5", |b| {
        b.iter(|| minimize_eigen(&mesh, 1.5, 1.0, 1.5, 1e-6).unwrap().lambda)
    });
    group.bench_function("torsion_p2", |b| {
        b.iter(|| maximize_torsion(&mesh, 2.0, 1.0, 1e-8).unwrap().t)
    });
    group.finish();
}

fn bench_web(c: &mut Criterion) {
    let dom = square_domain();
    let mesh = triangulate(&dom, 0.05).unwrap();
    let qm = dom.hole().quermassintegrals().unwrap();
    let shell = match_shell(&qm, dom.area(), 2).unwrap();
    let eig = solve_radial_eigen(&shell, 2.0, 1.0, 1e-10).unwrap();
    let mut group = c.benchmark_group("web");
    group.sample_size(20);
    group.bench_function("build_field", |b| {
        b.iter(|| build_web_field(&dom, &eig.profile, &mesh).unwrap().values.len())
    });
    group.bench_function("verify_chain_64", |b| {
        b.iter(|| verify_eigen_chain(&dom, &eig.profile, eig.lambda, &mesh, 64).unwrap().pass)
    });
    group.finish();
}

criterion_group!(benches, bench_radial, bench_mesh, bench_fem, bench_web);
criterion_main!(benches);

use blaschke_core::blaschke::BlaschkeProduct;
use blaschke_core::boundary::{make_grid, weak_quasinorm};
use blaschke_core::logmean::{dyadic_increments, t_exact};
use blaschke_core::modelspace::{gram_matrix, ModelFunction};
use blaschke_core::zeroseq::{generate_geometric, generate_power, AngleRule};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use std::hint::black_box;

fn rule() -> AngleRule {
    AngleRule::UniformRandom { seed: 1 }
}

fn grid_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("make_grid");
    for n in [10, 40] {
        let z = generate_geometric(1.0, 0.5, n, &rule()).unwrap();
        g.bench_with_input(BenchmarkId::new("geometric", n), &z, |b, z| {
            b.iter(|| make_grid(black_box(z), 1 << 14, 64).unwrap())
        });
    }
    let z = generate_power(2.0, 400, &rule()).unwrap();
    g.bench_function("power/400", |b| {
        b.iter(|| make_grid(black_box(&z), 1 << 14, 64).unwrap())
    });
    g.finish();
}

fn boundary_sampling(c: &mut Criterion) {
    let z = generate_geometric(1.0, 0.5, 40, &rule()).unwrap();
    let b = BlaschkeProduct::new(z.clone()).unwrap();
    let grid = make_grid(&z, 1 << 14, 64).unwrap();
    c.bench_function("boundary_derivative/N40", |bch| {
        bch.iter(|| grid.sample(|p| b.boundary_derivative_modulus_at(p)))
    });
    let samples = grid.sample(|p| b.boundary_derivative_modulus_at(p));
    c.bench_function("weak_quasinorm/N40", |bch| {
        bch.iter(|| weak_quasinorm(black_box(&samples), &grid, 1.0).unwrap())
    });
    let a = Complex64::new(0.5, 0.3);
    c.bench_function("frostman_shift/N40", |bch| {
        bch.iter(|| grid.try_sample(|p| b.frostman_shift_boundary_at(a, p)).unwrap())
    });
}

fn logmean(c: &mut Criterion) {
    let z = generate_power(2.0, 400, &rule()).unwrap();
    let b = BlaschkeProduct::new(z).unwrap();
    c.bench_function("t_exact/power400", |bch| {
        bch.iter(|| t_exact(&b, black_box(0.999)).unwrap())
    });
    c.bench_function("dyadic_increments/power400", |bch| {
        bch.iter(|| dyadic_increments(&b, black_box(35)).unwrap())
    });
}

fn model_space(c: &mut Criterion) {
    let mut g = c.benchmark_group("model_space");
    for m in [10, 40] {
        let z = generate_geometric(1.0, 0.25, m, &rule()).unwrap();
        let beta: Vec<Complex64> = (0..m).map(|k| Complex64::new(1.0, k as f64)).collect();
        let f = ModelFunction::new(z.clone(), beta).unwrap();
        g.bench_with_input(BenchmarkId::new("gram", m), &z, |b, z| {
            b.iter(|| gram_matrix(black_box(z)))
        });
        g.bench_with_input(BenchmarkId::new("l2_norm", m), &f, |b, f| {
            b.iter(|| f.l2_norm().unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, grid_build, boundary_sampling, logmean, model_space);
criterion_main!(benches);

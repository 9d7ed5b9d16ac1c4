use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use drharmonic::jacobi::spherical_phi;
use drharmonic::radial::{lip_deviation, spherical_transform};
use drharmonic_bench::fixture;

fn phi(c: &mut Criterion) {
    let fx = fixture(2, 1);
    let mut g = c.benchmark_group("spherical_phi");
    // Series regime, then ODE continuation.
    for (lam, t) in [(1.0, 0.5), (1.0, 3.0), (20.0, 0.1), (20.0, 6.0)] {
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("lam{lam}_t{t}")),
            &(lam, t),
            |b, &(lam, t)| b.iter(|| spherical_phi(&fx.params, black_box(lam), black_box(t)).unwrap()),
        );
    }
    g.finish();
}

fn transform(c: &mut Criterion) {
    let mut g = c.benchmark_group("spherical_transform");
    g.sample_size(10);
    for (m, k) in [(2, 1), (4, 3)] {
        let fx = fixture(m, k);
        g.bench_function(format!("gauss_m{m}_k{k}"), |b| {
            b.iter(|| spherical_transform(&fx.params, &fx.gauss, &fx.lambda_grid).unwrap())
        });
    }
    g.finish();
}

fn deviation(c: &mut Criterion) {
    let fx = fixture(2, 1);
    let mut g = c.benchmark_group("lip_deviation");
    g.sample_size(10);
    for &t in [fx.t_grid[0], fx.t_grid[fx.t_grid.len() - 1]].iter() {
        g.bench_with_input(BenchmarkId::from_parameter(format!("t{t:.0e}")), &t, |b, &t| {
            b.iter(|| lip_deviation(&fx.params, &fx.power, black_box(t), 2.0, None).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, phi, transform, deviation);
criterion_main!(benches);

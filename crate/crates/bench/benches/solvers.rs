use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use polewave_core::presets::Scenario;
use polewave_core::scattering::{build_kernel, solve_half_offshell};
use polewave_core::structure::locate_pole;

fn kernel_and_solve(c: &mut Criterion) {
    let sc = Scenario::preset("model-c").unwrap();
    let ds = sc.discretize(0).unwrap();
    let e = Complex64::new(1420.0, -5.0);
    c.bench_function("model-c discretize n=200", |b| b.iter(|| black_box(sc.discretize(0).unwrap())));
    c.bench_function("model-c kernel n=200", |b| b.iter(|| black_box(build_kernel(&ds, black_box(e)).unwrap())));
    c.bench_function("model-c half-off-shell solve n=200", |b| {
        b.iter(|| black_box(solve_half_offshell(&ds, black_box(e)).unwrap()))
    });
}

fn pole_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("pole search");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for name in ["model-b", "model-c", "model-d"] {
        let sc = Scenario::preset(name).unwrap();
        let ds = sc.discretize(0).unwrap();
        let guess = sc.states[0].guess;
        group.bench_function(name, |b| b.iter(|| black_box(locate_pole(&ds, guess).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, kernel_and_solve, pole_search);
criterion_main!(benches);

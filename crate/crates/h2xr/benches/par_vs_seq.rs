//! Worker-pool speedup measurements. Every `Exec`-parameterized entry
//! point promises identical results either way, so these benches only
//! compare wall time: the angular-mode spectral sweep (one eigenproblem
//! census per mode) and the tall-rectangle witness scan (one certified
//! quadrature per cut exponent).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use h2xr::catenoid::Catenoid;
use h2xr::jacobi::{kernel_report, WeightForm};
use h2xr::par::Exec;
use h2xr::tallrect::TallRectangle;

fn mode_sweep(c: &mut Criterion) {
    let cat = Catenoid::from_kappa(1.0).unwrap();
    let mut group = c.benchmark_group("kernel_report");
    group.sample_size(20);
    for (label, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_with_input(BenchmarkId::new(label, "128x6"), &exec, |b, &exec| {
            b.iter(|| kernel_report(&cat, 128, 6, WeightForm::Flat, exec).unwrap());
        });
    }
    group.finish();
}

fn witness_scan(c: &mut Criterion) {
    let rect = TallRectangle::new(2.0).unwrap();
    let powers: Vec<usize> = (4..=24).collect();
    let mut group = c.benchmark_group("witness_family");
    group.sample_size(10);
    for (label, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_with_input(BenchmarkId::new(label, "n4..24"), &exec, |b, &exec| {
            b.iter(|| rect.witness_family(&powers, exec));
        });
    }
    group.finish();
}

criterion_group!(benches, mode_sweep, witness_scan);
criterion_main!(benches);

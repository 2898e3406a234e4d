use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use newton_dual::duality::PotentialSpec;
use newton_dual::oracle::{fd_bound_spectrum_with, RadialGrid};
use newton_dual::par::Exec;
use newton_dual::spectra::{bound_spectrum_with, SolveOptions, SpectrumRequest};

fn k2_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("k2_spectrum");
    g.sample_size(10);
    let mut req = SpectrumRequest::new(PotentialSpec::power(-1.0, -1.5), 0.0, (-2.0, -0.02), 4);
    req.scan_points = 128;
    for exec in [Exec::Sequential, Exec::Parallel] {
        let opts = SolveOptions { exec, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &opts, |b, o| {
            b.iter(|| bound_spectrum_with(&req, o).unwrap())
        });
    }
    g.finish();
}

fn fd_levels(c: &mut Criterion) {
    let mut g = c.benchmark_group("fd_spectrum");
    g.sample_size(10);
    let u = PotentialSpec::power(1.0, 6.0);
    let grid = RadialGrid::new(1e-6, 4.0, 8000).unwrap();
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| fd_bound_spectrum_with(&u, 0.0, &grid, 16, e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, k2_scan, fd_levels);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eistwist::eisenstein::{eval_classical_many, fourier_series_many, EisensteinParams};
use eistwist::group::cusp_set;
use eistwist::newform::ModularSymbols;
use eistwist::special::UpperHalfPoint;
use eistwist::{c64, Exec};

fn params(exec: Exec) -> EisensteinParams {
    EisensteinParams::new(cusp_set(37).unwrap().remove(0), c64(2.5, 0.0))
        .with_tolerance(1e-9)
        .with_exec(exec)
}

fn coset_sums(c: &mut Criterion) {
    let zs: Vec<UpperHalfPoint> = (0..16)
        .map(|j| UpperHalfPoint::new(j as f64 / 16.0, 0.4).unwrap())
        .collect();
    let symbols = ModularSymbols::canonical().unwrap();
    let ns: Vec<i64> = (1..=8).collect();
    // warm the ψ cache so both strategies measure summation only
    fourier_series_many(&params(Exec::Parallel), &params(Exec::Parallel).cusp, &ns, Some(&symbols)).unwrap();

    let mut group = c.benchmark_group("coset_sums");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let p = params(exec);
        group.bench_with_input(BenchmarkId::new("classical_16_points", format!("{exec:?}")), &p, |b, p| {
            b.iter(|| eval_classical_many(p, &zs).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("twisted_kloosterman_8", format!("{exec:?}")), &p, |b, p| {
            b.iter(|| fourier_series_many(p, &p.cusp, &ns, Some(&symbols)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, coset_sums);
criterion_main!(benches);

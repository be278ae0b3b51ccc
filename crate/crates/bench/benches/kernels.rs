use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dequant_core::fourier::mnls;
use dequant_core::numeric::haar_unitary;
use dequant_core::{Dataset, DiagonalEncoding, FeatureMap, FrequencySet, Observable, QuantumModel, SeededRng};

fn bench_haar(c: &mut Criterion) {
    let mut group = c.benchmark_group("haar_unitary");
    for n in [8usize, 32, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut rng = SeededRng::new(1, 0);
            b.iter(|| haar_unitary(black_box(n), &mut rng).unwrap());
        });
    }
    group.finish();
}

fn bench_mnls(c: &mut Criterion) {
    let mut group = c.benchmark_group("mnls");
    for (pairs, points) in [(50usize, 20usize), (250, 50), (1000, 100)] {
        let fm = FeatureMap::new(FrequencySet::half_lattice(2, pairs, true).unwrap());
        let mut rng = SeededRng::new(2, 0);
        let xs = fm.sample_inputs(points, &mut rng);
        let y = (0..points).map(|i| (i as f64).sin()).collect();
        let ds = Dataset::with_domain(xs, y, fm.period()).unwrap();
        group.bench_function(BenchmarkId::new(format!("p{}", fm.p()), points), |b| {
            b.iter(|| mnls(black_box(&fm), black_box(&ds)).unwrap());
        });
    }
    group.finish();
}

fn bench_coeffs(c: &mut Criterion) {
    let mut group = c.benchmark_group("model_coeffs");
    for n in [3u32, 5, 7] {
        let enc = DiagonalEncoding::ternary(n).unwrap();
        let obs = Observable::default_for(enc.dim()).unwrap();
        let mut rng = SeededRng::new(3, 0);
        let model = QuantumModel::simple(&enc, haar_unitary(enc.dim(), &mut rng).unwrap(), &obs).unwrap();
        group.bench_with_input(BenchmarkId::new("ternary", n), &model, |b, m| b.iter(|| m.coeffs()));
    }
    group.finish();
}

criterion_group!(benches, bench_haar, bench_mnls, bench_coeffs);
criterion_main!(benches);

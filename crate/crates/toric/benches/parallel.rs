//! Thread-count and engine comparisons for the hot paths: patch sampling,
//! the full convergence sweep, and the two Hausdorff engines. With the
//! default `parallel` feature the pool size matters; built with
//! `--no-default-features` every pool runs the sequential fallback, which
//! makes the same benches measure that path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use toric::degeneration::convergence_sweep;
use toric::hausdorff::{hausdorff_brute, hausdorff_indexed};
use toric::lattice::LatticeConfig;
use toric::patch::{bezier_curve, PatchSpec};
use toric::sample::sample_patch;
use toric::subdivision::Lifting;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
}

fn bicubic() -> PatchSpec {
    let mut pts = Vec::new();
    for j in 0..4i64 {
        for i in 0..4i64 {
            pts.push(vec![i, j]);
        }
    }
    let config = LatticeConfig::new(2, pts).unwrap();
    let f = [0.0, 1.0, 1.0, 0.0];
    let weights: Vec<f64> = (0..16).map(|k| [1.0, 3.0, 3.0, 1.0][k % 4] * [1.0, 3.0, 3.0, 1.0][k / 4]).collect();
    let controls: Vec<Vec<f64>> = (0..16)
        .map(|k| vec![(k % 4) as f64, (k / 4) as f64, f[k % 4] * f[k / 4]])
        .collect();
    PatchSpec::new(config, weights, controls).unwrap()
}

fn cubic() -> (PatchSpec, Lifting) {
    let spec = PatchSpec::new(
        bezier_curve(3).unwrap(),
        vec![1.0, 4.0, 4.0, 1.0],
        vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![3.0, 2.0], vec![4.0, 0.0]],
    )
    .unwrap();
    (spec, Lifting::from_ints(&[0, 1, 2, 0]))
}

fn bench_sampling(c: &mut Criterion) {
    let spec = bicubic();
    let mut group = c.benchmark_group("sample_bicubic_m65");
    for threads in [1usize, 2, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            let pool = pool(t);
            b.iter(|| pool.install(|| sample_patch(&spec, 65).unwrap()));
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let (spec, lifting) = cubic();
    let schedule = [1.0, 5.0, 25.0, 125.0, 625.0];
    let mut group = c.benchmark_group("cubic_sweep_m65");
    group.sample_size(20);
    for threads in [1usize, 2, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            let pool = pool(t);
            b.iter(|| pool.install(|| convergence_sweep(&spec, &lifting, &schedule, 65).unwrap()));
        });
    }
    group.finish();
}

fn clouds(n: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    // Deterministic quasi-random 3D clouds; the second is a shifted copy.
    let point = |k: usize, shift: f64| {
        let k = k as f64;
        vec![
            (k * 0.754877666).fract() * 10.0 + shift,
            (k * 0.569840291).fract() * 10.0,
            (k * 0.362471707).fract() * 10.0,
        ]
    };
    (
        (0..n).map(|k| point(k, 0.0)).collect(),
        (0..n).map(|k| point(k, 0.25)).collect(),
    )
}

fn bench_hausdorff(c: &mut Criterion) {
    let (x, y) = clouds(2000);
    assert_eq!(
        hausdorff_brute(&x, &y).unwrap().to_bits(),
        hausdorff_indexed(&x, &y).unwrap().to_bits()
    );
    let mut group = c.benchmark_group("hausdorff_2000x2000");
    group.sample_size(20);
    group.bench_function("brute", |b| b.iter(|| hausdorff_brute(&x, &y).unwrap()));
    group.bench_function("indexed", |b| b.iter(|| hausdorff_indexed(&x, &y).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_sampling, bench_sweep, bench_hausdorff);
criterion_main!(benches);

//! Monte-Carlo engine throughput and the noisy-label exact sum.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use scaling_lab::noisy::{exact_loss, NoiseModel};
use scaling_lab::sim::run_ensemble;
use scaling_lab::{DistSpec, ExperimentConfig, FeatureDistribution};

fn build(spec: &str) -> FeatureDistribution {
    spec.parse::<DistSpec>().unwrap().build().unwrap()
}

fn bench_ensemble(c: &mut Criterion) {
    let dist = build("zipf:alpha=1,trunc=1000");
    let config = ExperimentConfig {
        seed: 7,
        runs_k: 200,
        horizon_n: 512,
        loss_scale: 1.0,
        dist_spec: "zipf:alpha=1,trunc=1000".to_string(),
    };
    c.bench_function("run_ensemble zipf k=200 N=512", |b| {
        b.iter(|| run_ensemble(black_box(&dist), black_box(&config)).unwrap())
    });
}

fn bench_exact_loss(c: &mut Criterion) {
    let dist = build("zipf:alpha=1");
    let noise = NoiseModel::Uniform(0.25);
    c.bench_function("exact_loss zipf gamma=0.25 n=200", |b| {
        b.iter(|| exact_loss(black_box(&dist), black_box(&noise), black_box(200)).unwrap())
    });
}

criterion_group!(benches, bench_ensemble, bench_exact_loss);
criterion_main!(benches);

use std::hint::black_box;

use angio_core::augment::{build_training_stream, AugmentConfig, SourceImage, StreamOptions, Tiers};
use angio_core::phantom::phantom_suite;
use angio_core::seg_eval::score_batch;
use angio_core::severity::estimate_batch;
use angio_core::stats::{bootstrap_ci, BootstrapConfig};
use angio_core::{BinaryMask, Execution, GrayImage};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn severity(c: &mut Criterion) {
    let masks: Vec<BinaryMask> = phantom_suite(32, 7).into_iter().map(|p| p.mask).collect();
    let mut g = c.benchmark_group("severity_batch");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| estimate_batch(black_box(&masks), exec))
        });
    }
    g.finish();
}

fn bootstrap(c: &mut Criterion) {
    let values: Vec<f64> = (0..500).map(|i| ((i * 37) % 101) as f64 / 10.0).collect();
    let mean = |s: &[f64]| Some(s.iter().sum::<f64>() / s.len() as f64);
    let cfg = BootstrapConfig { iterations: 2000, ..Default::default() };
    let mut g = c.benchmark_group("bootstrap");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| bootstrap_ci(black_box(&values), mean, cfg, exec).unwrap())
        });
    }
    g.finish();
}

fn seg_scoring(c: &mut Criterion) {
    let masks: Vec<BinaryMask> = phantom_suite(16, 3)
        .into_iter()
        .map(|p| p.mask.resize_nearest(256, 256))
        .collect();
    let pairs: Vec<(BinaryMask, BinaryMask)> =
        masks.iter().zip(masks.iter().rev()).map(|(a, b)| (a.clone(), b.clone())).collect();
    let mut g = c.benchmark_group("seg_scoring");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| score_batch(black_box(&pairs), exec))
        });
    }
    g.finish();
}

fn training_stream(c: &mut Criterion) {
    let sources: Vec<SourceImage> = (0..8)
        .map(|i| SourceImage {
            id: format!("s{i}"),
            image: GrayImage::from_fn(128, 128, |x, y| ((x * (i + 3) + y * 7) % 256) as u8),
            lesions: Vec::new(),
        })
        .collect();
    let cfg = AugmentConfig::default();
    let mut g = c.benchmark_group("training_stream");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| build_training_stream(black_box(&sources), &cfg, Tiers::ALL, StreamOptions::default(), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, severity, bootstrap, seg_scoring, training_stream);
criterion_main!(benches);

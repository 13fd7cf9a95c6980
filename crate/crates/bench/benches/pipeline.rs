use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ldes_bench::{anamorphic, checkerboard, correspondences, fisheye};
use ldes_core::calibrate::{fit, FitConfig, Parameter};
use ldes_core::mapgen::{generate_footage_map, generate_view_map};
use ldes_core::resample::{apply_stmap, bake, SampleFilter};
use ldes_core::transform::{normalize_fov, rotate_view_map};
use ldes_core::{FovAngle, ProjectionParams};

fn mapgen(c: &mut Criterion) {
    let view = anamorphic();
    let lens = fisheye();
    c.bench_function("generate_view_map 960x540", |b| {
        b.iter(|| generate_view_map(black_box(&view), 960, 540, true).unwrap())
    });
    c.bench_function("generate_footage_map 512", |b| b.iter(|| generate_footage_map(black_box(&lens), 512).unwrap()));
}

fn transforms(c: &mut Criterion) {
    let vmap = generate_view_map(&anamorphic(), 960, 540, false).unwrap();
    let common = FovAngle::from_noted(180).unwrap();
    c.bench_function("normalize_fov 960x540", |b| b.iter(|| normalize_fov(black_box(&vmap), common).unwrap()));
    c.bench_function("rotate_view_map 960x540", |b| {
        b.iter(|| rotate_view_map(black_box(&vmap), 0.2, -0.1, 0.05).unwrap())
    });
}

fn resampling(c: &mut Criterion) {
    let vmap = generate_view_map(&anamorphic(), 960, 540, false).unwrap();
    let fmap = generate_footage_map(&fisheye(), 512).unwrap();
    let footage = checkerboard(1024, 1024, 16);
    let stmap = bake(&vmap, &fmap, SampleFilter::BILINEAR, 1).unwrap();
    let mut group = c.benchmark_group("bake 960x540");
    for (name, filter, n) in [
        ("bilinear", SampleFilter::BILINEAR, 1),
        ("catmull-rom", SampleFilter::CATMULL_ROM, 1),
        ("catmull-rom 2x2", SampleFilter::CATMULL_ROM, 2),
    ] {
        group.bench_function(name, |b| b.iter(|| bake(black_box(&vmap), &fmap, filter, n).unwrap()));
    }
    group.finish();
    let mut group = c.benchmark_group("apply_stmap 960x540");
    for (name, filter) in [("bilinear", SampleFilter::BILINEAR), ("catmull-rom", SampleFilter::CATMULL_ROM)] {
        group.bench_function(name, |b| b.iter(|| apply_stmap(black_box(&footage), &stmap, filter).unwrap()));
    }
    group.finish();
}

fn calibration(c: &mut Criterion) {
    let truth = anamorphic();
    let data = correspondences(&truth, 200);
    let seed = ProjectionParams::spherical(FovAngle::from_degrees(120.0).unwrap(), 0.0, truth.aspect);
    let config = FitConfig::new(vec![Parameter::Omega, Parameter::K, Parameter::Squeeze]);
    c.bench_function("fit omega,k,squeeze 200 points", |b| b.iter(|| fit(black_box(&data), &seed, &config).unwrap()));
}

criterion_group!(benches, mapgen, transforms, resampling, calibration);
criterion_main!(benches);

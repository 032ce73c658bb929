//! Core operators on one thread versus the default rayon pool, and partial
//! versus full inpainting updates.
//!
//! Build with `--no-default-features` to time the sequential fallback.

use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use paco::{inpaint, maskgen, InpaintConfig, OrthoDct, PatchGrid, Signal};

fn image(n: usize) -> Signal {
    let s = (0..n * n)
        .map(|k| {
            let (y, x) = ((k / n) as f64 / n as f64, (k % n) as f64 / n as f64);
            128.0 + 60.0 * (TAU * 3.0 * x).cos() + 40.0 * (TAU * 2.0 * y).sin()
        })
        .collect();
    Signal::new(vec![n, n], s, 255.0).unwrap()
}

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let default = rayon::current_num_threads();
    let mut sizes = vec![1];
    if default > 1 {
        sizes.push(default);
    }
    sizes
        .into_iter()
        .map(|t| (format!("{t}-thread"), rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap()))
        .collect()
}

fn operators(c: &mut Criterion) {
    let img = image(256);
    let grid = PatchGrid::build(&[256, 256], &[16, 16], &[2, 2]).unwrap();
    let dct = OrthoDct::new(&[16, 16]).unwrap();
    let y = grid.extract(&img).unwrap();

    let mut g = c.benchmark_group("operators");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new("project_consensus", &name), &y, |b, y| {
            pool.install(|| b.iter(|| grid.project_consensus(black_box(y)).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("dct_forward", &name), &y, |b, y| {
            pool.install(|| b.iter(|| dct.forward(black_box(y)).unwrap()))
        });
    }
    g.finish();
}

fn updates(c: &mut Criterion) {
    let img = image(128);
    let mask = maskgen::scratches([128, 128], 4, 2, 7).unwrap();
    let mut g = c.benchmark_group("inpaint_10_iterations");
    g.sample_size(10);
    for partial in [false, true] {
        let mut cfg = InpaintConfig::image().with_max_iter(10);
        cfg.tol = f64::MIN_POSITIVE;
        cfg.partial_updates = partial;
        let label = if partial { "partial" } else { "full" };
        for (name, pool) in pools() {
            g.bench_function(BenchmarkId::new(label, &name), |b| {
                pool.install(|| b.iter(|| inpaint(black_box(&img), &mask, &cfg).unwrap()))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, operators, updates);
criterion_main!(benches);

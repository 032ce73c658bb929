//! Fixtures and independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use paco::patch_grid::oracle::DenseMatrix;
use paco::{maskgen, Mask, PatchGrid, PatchMatrix, Signal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random grids with at most 64 samples: 1-D and 2-D, strides 1 to 3.
pub fn random_grids(count: usize, seed: u64) -> Vec<PatchGrid> {
    let mut r = rng(seed);
    (0..count)
        .map(|k| {
            if k % 2 == 0 {
                let n = r.random_range(4..=64);
                let p = r.random_range(1..=n.min(8));
                let s = r.random_range(1..=p.min(3));
                PatchGrid::build(&[n], &[p], &[s]).unwrap()
            } else {
                let h = r.random_range(2..=8);
                let w = r.random_range(2..=64 / h);
                let ph = r.random_range(1..=h.min(4));
                let pw = r.random_range(1..=w.min(4));
                let (sh, sw) = (r.random_range(1..=ph.min(3)), r.random_range(1..=pw.min(3)));
                PatchGrid::build(&[h, w], &[ph, pw], &[sh, sw]).unwrap()
            }
        })
        .collect()
}

pub fn random_patches(grid: &PatchGrid, scale: f64, r: &mut impl Rng) -> PatchMatrix {
    let (m, n) = (grid.patch_len(), grid.patch_count());
    PatchMatrix::from_vec(m, n, (0..m * n).map(|_| r.random_range(-scale..scale)).collect()).unwrap()
}

/// Orthonormal DCT-II matrix of length `n`, row `k` = basis function `k`.
pub fn dct_matrix(n: usize) -> DenseMatrix {
    let mut d = DenseMatrix::zeros(n, n);
    for k in 0..n {
        let c = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
        for i in 0..n {
            d.data[k * n + i] = c * (PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos();
        }
    }
    d
}

/// Kronecker product of 1-D DCT matrices, last axis fastest.
pub fn dense_dct(shape: &[usize]) -> DenseMatrix {
    let mut acc = DenseMatrix { rows: 1, cols: 1, data: vec![1.0] };
    for &n in shape {
        let d = dct_matrix(n);
        let mut k = DenseMatrix::zeros(acc.rows * n, acc.cols * n);
        for (i, j) in (0..acc.rows).flat_map(|i| (0..acc.cols).map(move |j| (i, j))) {
            for (a, b) in (0..n).flat_map(|a| (0..n).map(move |b| (a, b))) {
                k.data[(i * n + a) * k.cols + j * n + b] = acc.at(i, j) * d.at(a, b);
            }
        }
        acc = k;
    }
    acc
}

/// `argmin_x w|x| + (x − a)²/2λ` by exhaustive search on a grid of step `h`
/// spanning the segment between 0 and `a`, which contains the minimizer.
pub fn prox_grid_search(a: f64, w: f64, lambda: f64, h: f64) -> f64 {
    let obj = |x: f64| w * x.abs() + (x - a) * (x - a) / (2.0 * lambda);
    let lo = a.min(0.0) - 2.0 * h;
    let steps = ((a.abs() + 4.0 * h) / h).ceil() as usize;
    let mut best = (obj(lo), lo);
    for k in 1..=steps {
        let x = lo + k as f64 * h;
        let v = obj(x);
        if v < best.0 {
            best = (v, x);
        }
    }
    best.1
}

/// The N=4 weighted-ℓ1 fixture: patch 3, stride 1, samples 0 and 3 known.
pub struct TinyProblem {
    pub grid: PatchGrid,
    pub mask: Mask,
    pub known: Signal,
    pub weights: Vec<f64>,
}

impl TinyProblem {
    pub fn new() -> Self {
        TinyProblem {
            grid: PatchGrid::build(&[4], &[3], &[1]).unwrap(),
            mask: Mask::new(vec![4], vec![true, false, false, true]).unwrap(),
            known: Signal::new(vec![4], vec![0.9, 0.0, 0.0, 0.1], 1.0).unwrap(),
            weights: vec![0.2, 1.0, 1.7],
        }
    }

    /// Signal-space objective `Σ_j Σ_i w_i |(D R_j z)_i|` with z₁, z₂ free.
    pub fn objective(&self, z1: f64, z2: f64) -> f64 {
        let d = dct_matrix(3);
        let z = [self.known.samples()[0], z1, z2, self.known.samples()[3]];
        let mut f = 0.0;
        for j in 0..2 {
            for i in 0..3 {
                let c: f64 = (0..3).map(|k| d.at(i, k) * z[j + k]).sum();
                f += self.weights[i] * c.abs();
            }
        }
        f
    }

    /// Coarse-to-fine exhaustive search for the minimizing (z₁, z₂).
    pub fn brute_force(&self) -> [f64; 2] {
        let mut centre = [0.5, 0.5];
        let mut half: f64 = 2.0;
        let mut h: f64 = 0.01;
        while h >= 1e-7 {
            let k = (half / h).round() as i64;
            let mut best = (f64::INFINITY, centre);
            for a in -k..=k {
                for b in -k..=k {
                    let p = [centre[0] + a as f64 * h, centre[1] + b as f64 * h];
                    let v = self.objective(p[0], p[1]);
                    if v < best.0 {
                        best = (v, p);
                    }
                }
            }
            centre = best.1;
            half = 5.0 * h;
            h /= 10.0;
        }
        centre
    }

    /// Mean of the known samples in the gap, extracted into patches.
    pub fn init(&self) -> PatchMatrix {
        let mut s = self.known.samples().to_vec();
        s[1] = 0.5;
        s[2] = 0.5;
        self.grid.extract_samples(&s)
    }
}

/// `Π` onto {R x : x ∈ [lo, hi]^N} by projected gradient on x, the small
/// box-constrained least-squares problem `min ‖R x − Y‖²`.
pub fn box_consensus_qp(grid: &PatchGrid, y: &PatchMatrix, lo: f64, hi: f64) -> PatchMatrix {
    let r = paco::patch_grid::oracle::dense_extraction(grid).unwrap();
    let rt = r.transpose();
    let rtr = rt.matmul(&r);
    let rty = rt.matvec(y.as_slice());
    let n = grid.signal_len();
    let lipschitz = (0..n).map(|i| (0..n).map(|j| rtr.at(i, j).abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / lipschitz;
    let mut x = vec![0.5 * (lo + hi); n];
    for _ in 0..200_000 {
        let g: Vec<f64> = rtr.matvec(&x).iter().zip(&rty).map(|(a, b)| a - b).collect();
        let next: Vec<f64> = x.iter().zip(&g).map(|(v, d)| (v - step * d).clamp(lo, hi)).collect();
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if moved < 1e-15 {
            break;
        }
    }
    PatchMatrix::from_vec(grid.patch_len(), grid.patch_count(), r.matvec(&x)).unwrap()
}

/// 64×64 image: three low-frequency cosines, peak 255.
pub fn band_limited_image() -> Signal {
    let n = 64;
    let s = (0..n * n)
        .map(|k| {
            let (y, x) = ((k / n) as f64 / n as f64, (k % n) as f64 / n as f64);
            128.0 + 50.0 * (TAU * x).cos() + 35.0 * (TAU * (x + 2.0 * y) + 0.3).cos() + 25.0 * (TAU * 3.0 * y - 1.1).cos()
        })
        .collect();
    Signal::new(vec![n, n], s, 255.0).unwrap()
}

pub fn image_hole() -> Mask {
    maskgen::rectangle([64, 64], 28, 28, 8, 8).unwrap()
}

pub const AUDIO_RATE: f64 = 11025.0;

/// Three-partial harmonic tone at 11025 Hz, rounded to integers.
pub fn harmonic_audio(seconds: f64) -> Signal {
    let n = (seconds * AUDIO_RATE) as usize;
    let s = (0..n)
        .map(|i| {
            let t = i as f64 / AUDIO_RATE;
            (8000.0 * (TAU * 220.0 * t).sin() + 5000.0 * (TAU * 440.0 * t).sin() + 3000.0 * (TAU * 660.0 * t).sin())
                .round()
        })
        .collect();
    Signal::new(vec![n], s, 32768.0).unwrap()
}

/// Erasures at the experimental audio rates: starts at 1e-4 per sample,
/// mean length 1000.
pub fn audio_mask(len: usize) -> Mask {
    maskgen::audio_erasures(len, 1e-4, 1000.0, 1).unwrap().mask
}

/// Small frame stack with one drifting scratch.
pub fn video_fixture() -> (Signal, Mask) {
    let (t, h, w) = (6, 24, 24);
    let s = (0..t * h * w)
        .map(|k| {
            let (f, y, x) = (k / (h * w), (k / w) % h, k % w);
            128.0 + 60.0 * (TAU * (x as f64 + f as f64) / w as f64).cos() + 30.0 * (TAU * y as f64 / h as f64).sin()
        })
        .collect();
    let video = Signal::new(vec![t, h, w], s, 255.0).unwrap();
    (video, maskgen::video_scratches([t, h, w], 1, 2, 3).unwrap())
}

/// Zeroes the missing samples.
pub fn degrade(signal: &Signal, mask: &Mask) -> Signal {
    let mut d = signal.clone();
    for i in mask.missing_indices() {
        d.samples_mut()[i] = 0.0;
    }
    d
}

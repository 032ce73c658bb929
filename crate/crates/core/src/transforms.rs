//! Patch transforms: the orthonormal separable DCT-II and dense
//! synthesis dictionaries.
//!
//! Conventions: `OrthoDct::forward` is analysis (a = D y) and
//! `OrthoDct::inverse` synthesis (y = Dᵀ a). A [`Dictionary`] stores its
//! atoms as columns and synthesizes with `y = D a`.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustdct::{DctPlanner, TransformType2And3};

use crate::error::{PacoError, Result};
use crate::exec;
use crate::patch_grid::PatchMatrix;

/// Axes longer than this use the FFT-based transform instead of a dense
/// cosine table.
const DENSE_MAX_LEN: usize = 32;

/// Safety factor applied to power-iteration norm estimates.
pub const NORM_SAFETY: f64 = 1.01;

#[derive(Clone)]
enum AxisKernel {
    /// `table[k * n + i] = s_k cos(π (2i + 1) k / 2n)`
    Dense { n: usize, table: Vec<f64> },
    Fast {
        n: usize,
        plan: Arc<dyn TransformType2And3<f64>>,
        scale: Vec<f64>,
    },
}

impl std::fmt::Debug for AxisKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxisKernel::Dense { n, .. } => write!(f, "Dense({n})"),
            AxisKernel::Fast { n, .. } => write!(f, "Fast({n})"),
        }
    }
}

fn ortho_scale(n: usize, k: usize) -> f64 {
    if k == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

impl AxisKernel {
    fn new(n: usize, planner: &mut DctPlanner<f64>) -> Self {
        if n <= DENSE_MAX_LEN {
            let mut table = vec![0.0; n * n];
            for k in 0..n {
                for i in 0..n {
                    table[k * n + i] =
                        ortho_scale(n, k) * (PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos();
                }
            }
            AxisKernel::Dense { n, table }
        } else {
            AxisKernel::Fast {
                n,
                plan: planner.plan_dct2(n),
                scale: (0..n).map(|k| ortho_scale(n, k)).collect(),
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            AxisKernel::Dense { n, .. } | AxisKernel::Fast { n, .. } => *n,
        }
    }

    fn scratch_len(&self) -> usize {
        match self {
            AxisKernel::Dense { n, .. } => *n,
            AxisKernel::Fast { plan, .. } => plan.get_scratch_len(),
        }
    }

    fn forward(&self, line: &mut [f64], scratch: &mut [f64]) {
        match self {
            AxisKernel::Dense { n, table } => {
                let tmp = &mut scratch[..*n];
                tmp.copy_from_slice(line);
                for (k, out) in line.iter_mut().enumerate() {
                    let row = &table[k * n..(k + 1) * n];
                    *out = row.iter().zip(tmp.iter()).map(|(c, x)| c * x).sum();
                }
            }
            AxisKernel::Fast { plan, scale, .. } => {
                plan.process_dct2_with_scratch(line, &mut scratch[..plan.get_scratch_len()]);
                for (v, s) in line.iter_mut().zip(scale) {
                    *v *= s;
                }
            }
        }
    }

    fn inverse(&self, line: &mut [f64], scratch: &mut [f64]) {
        match self {
            AxisKernel::Dense { n, table } => {
                let tmp = &mut scratch[..*n];
                tmp.copy_from_slice(line);
                line.fill(0.0);
                for (k, &a) in tmp.iter().enumerate() {
                    let row = &table[k * n..(k + 1) * n];
                    for (out, c) in line.iter_mut().zip(row) {
                        *out += c * a;
                    }
                }
            }
            AxisKernel::Fast { plan, scale, .. } => {
                // DCT-III halves the first input term
                line[0] *= 2.0 * scale[0];
                for (v, s) in line.iter_mut().zip(scale).skip(1) {
                    *v *= s;
                }
                plan.process_dct3_with_scratch(line, &mut scratch[..plan.get_scratch_len()]);
            }
        }
    }
}

/// Orthonormal separable DCT-II over row-major patches.
#[derive(Debug, Clone)]
pub struct OrthoDct {
    patch_shape: Vec<usize>,
    kernels: Vec<AxisKernel>,
    len: usize,
}

struct DctScratch {
    line: Vec<f64>,
    work: Vec<f64>,
}

impl OrthoDct {
    pub fn new(patch_shape: &[usize]) -> Result<Self> {
        if patch_shape.is_empty() || patch_shape.contains(&0) {
            return Err(PacoError::param(format!("bad patch shape {patch_shape:?}")));
        }
        let mut planner = DctPlanner::new();
        let kernels = patch_shape
            .iter()
            .map(|&n| AxisKernel::new(n, &mut planner))
            .collect();
        Ok(OrthoDct {
            patch_shape: patch_shape.to_vec(),
            kernels,
            len: patch_shape.iter().product(),
        })
    }

    pub fn patch_shape(&self) -> &[usize] {
        &self.patch_shape
    }

    /// m
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn scratch(&self) -> DctScratch {
        let line = self.kernels.iter().map(AxisKernel::len).max().unwrap_or(0);
        let work = self.kernels.iter().map(AxisKernel::scratch_len).max().unwrap_or(0);
        DctScratch {
            line: vec![0.0; line],
            work: vec![0.0; work],
        }
    }

    fn apply_column(&self, col: &mut [f64], s: &mut DctScratch, inverse: bool) {
        let mut inner = self.len;
        for kernel in &self.kernels {
            let n = kernel.len();
            inner /= n;
            let outer = self.len / (n * inner);
            let line = &mut s.line[..n];
            for o in 0..outer {
                for i in 0..inner {
                    let base = o * n * inner + i;
                    for (t, v) in line.iter_mut().enumerate() {
                        *v = col[base + t * inner];
                    }
                    if inverse {
                        kernel.inverse(line, &mut s.work);
                    } else {
                        kernel.forward(line, &mut s.work);
                    }
                    for (t, v) in line.iter().enumerate() {
                        col[base + t * inner] = *v;
                    }
                }
            }
        }
    }

    fn apply(&self, y: &mut PatchMatrix, inverse: bool) -> Result<()> {
        if y.rows() != self.len {
            return Err(PacoError::shape(format!(
                "column length {} for a DCT over {:?}",
                y.rows(),
                self.patch_shape
            )));
        }
        exec::for_each_chunk_init(
            y.as_mut_slice(),
            self.len,
            || self.scratch(),
            |s, _, col| self.apply_column(col, s, inverse),
        );
        Ok(())
    }

    /// Analysis, column by column: a_j = D y_j.
    pub fn forward(&self, y: &PatchMatrix) -> Result<PatchMatrix> {
        let mut a = y.clone();
        self.apply(&mut a, false)?;
        Ok(a)
    }

    /// Synthesis, column by column: y_j = Dᵀ a_j.
    pub fn inverse(&self, a: &PatchMatrix) -> Result<PatchMatrix> {
        let mut y = a.clone();
        self.apply(&mut y, true)?;
        Ok(y)
    }

    pub fn forward_in_place(&self, y: &mut PatchMatrix) -> Result<()> {
        self.apply(y, false)
    }

    pub fn inverse_in_place(&self, a: &mut PatchMatrix) -> Result<()> {
        self.apply(a, true)
    }

    /// Transforms a single column in place.
    pub fn forward_column(&self, col: &mut [f64]) {
        assert_eq!(col.len(), self.len);
        let mut s = self.scratch();
        self.apply_column(col, &mut s, false);
    }

    pub fn inverse_column(&self, col: &mut [f64]) {
        assert_eq!(col.len(), self.len);
        let mut s = self.scratch();
        self.apply_column(col, &mut s, true);
    }
}

/// A dense synthesis dictionary `D ∈ ℝ^{m×p}` with a cached upper bound on
/// its spectral norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    rows: usize,
    atoms: usize,
    /// Column-major: atom `k` is `data[k*rows..(k+1)*rows]`.
    data: Vec<f64>,
    norm_bound: f64,
}

impl Dictionary {
    /// Builds a dictionary and bounds its norm with [`spectral_norm`].
    pub fn new(rows: usize, atoms: usize, data: Vec<f64>) -> Result<Self> {
        let mut d = Dictionary::unbounded(rows, atoms, data)?;
        d.norm_bound = spectral_norm(&d, 1000, 1e-12)?;
        Ok(d)
    }

    /// Builds a dictionary whose spectral norm is known to be at most `bound`.
    pub fn with_norm_bound(rows: usize, atoms: usize, data: Vec<f64>, bound: f64) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(PacoError::param(format!("norm bound {bound} must be positive")));
        }
        let mut d = Dictionary::unbounded(rows, atoms, data)?;
        d.norm_bound = bound;
        Ok(d)
    }

    fn unbounded(rows: usize, atoms: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || atoms == 0 {
            return Err(PacoError::param("dictionary needs at least one row and one atom"));
        }
        if data.len() != rows * atoms {
            return Err(PacoError::shape(format!(
                "{} values for a {rows}x{atoms} dictionary",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(PacoError::param("dictionary has non-finite entries"));
        }
        Ok(Dictionary {
            rows,
            atoms,
            data,
            norm_bound: f64::NAN,
        })
    }

    pub fn identity(m: usize) -> Result<Self> {
        let mut data = vec![0.0; m * m];
        for i in 0..m {
            data[i * m + i] = 1.0;
        }
        Dictionary::with_norm_bound(m, m, data, 1.0)
    }

    /// The orthonormal DCT as a synthesis dictionary: atom k is the k-th
    /// DCT basis patch, so `apply` equals [`OrthoDct::inverse`].
    pub fn orthonormal_dct(patch_shape: &[usize]) -> Result<Self> {
        let dct = OrthoDct::new(patch_shape)?;
        let m = dct.len();
        let mut data = vec![0.0; m * m];
        for k in 0..m {
            let col = &mut data[k * m..(k + 1) * m];
            col[k] = 1.0;
            dct.inverse_column(col);
        }
        Dictionary::with_norm_bound(m, m, data, 1.0)
    }

    /// m
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// p
    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Cached upper bound on ‖D‖₂.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Synthesis: `D a_j` for every coefficient column.
    pub fn apply(&self, a: &PatchMatrix) -> Result<PatchMatrix> {
        if a.rows() != self.atoms {
            return Err(PacoError::shape(format!(
                "coefficient length {} for a dictionary with {} atoms",
                a.rows(),
                self.atoms
            )));
        }
        let mut out = PatchMatrix::zeros(self.rows, a.cols());
        exec::for_each_chunk(out.as_mut_slice(), self.rows, |j, col| {
            self.apply_vec(a.column(j), col);
        });
        Ok(out)
    }

    /// Analysis with the adjoint: `Dᵀ y_j` for every patch column.
    pub fn adjoint(&self, y: &PatchMatrix) -> Result<PatchMatrix> {
        if y.rows() != self.rows {
            return Err(PacoError::shape(format!(
                "patch length {} for a dictionary with {} rows",
                y.rows(),
                self.rows
            )));
        }
        let mut out = PatchMatrix::zeros(self.atoms, y.cols());
        exec::for_each_chunk(out.as_mut_slice(), self.atoms, |j, col| {
            self.adjoint_vec(y.column(j), col);
        });
        Ok(out)
    }

    fn apply_vec(&self, a: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (k, &c) in a.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, d) in out.iter_mut().zip(&self.data[k * self.rows..(k + 1) * self.rows]) {
                *o += d * c;
            }
        }
    }

    fn adjoint_vec(&self, y: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.data[k * self.rows..(k + 1) * self.rows]
                .iter()
                .zip(y)
                .map(|(d, v)| d * v)
                .sum();
        }
    }

    /// Binary layout: `m`, `p` as little-endian u64, then `m·p` little-endian
    /// f64 values in column-major order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.data.len());
        out.extend_from_slice(&(self.rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.atoms as u64).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        if bytes.len() < 16 {
            return Err(PacoError::format(path, "dictionary header is truncated"));
        }
        let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
        let (m, p) = (word(0) as usize, word(8) as usize);
        let expected = m
            .checked_mul(p)
            .and_then(|n| n.checked_mul(8))
            .and_then(|n| n.checked_add(16))
            .ok_or_else(|| PacoError::format(path, "dictionary dimensions overflow"))?;
        if bytes.len() != expected {
            return Err(PacoError::format(
                path,
                format!("{} bytes for a {m}x{p} dictionary ({expected} expected)", bytes.len()),
            ));
        }
        let data = bytes[16..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Dictionary::new(m, p, data)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| PacoError::io(path, e))?;
        Dictionary::from_bytes(&bytes, path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| PacoError::io(path, e))
    }
}

/// Upper estimate of ‖D‖₂: power iteration on DᵀD, inflated by
/// [`NORM_SAFETY`] so that it stays above the true norm.
pub fn spectral_norm(d: &Dictionary, iters: usize, tol: f64) -> Result<f64> {
    let (m, p) = (d.rows, d.atoms);
    if d.data.iter().all(|&v| v == 0.0) {
        return Err(PacoError::param("spectral norm of a zero dictionary"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut dv = vec![0.0; m];
    let mut w = vec![0.0; p];
    let mut estimate = 0.0;
    for _ in 0..iters.max(1) {
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv == 0.0 {
            break;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        d.apply_vec(&v, &mut dv);
        d.adjoint_vec(&dv, &mut w);
        // Rayleigh quotient vᵀDᵀDv with ‖v‖ = 1
        let next = dv.iter().map(|x| x * x).sum::<f64>();
        std::mem::swap(&mut v, &mut w);
        let done = (next - estimate).abs() <= tol * next;
        estimate = next;
        if done {
            break;
        }
    }
    Ok(NORM_SAFETY * estimate.sqrt())
}

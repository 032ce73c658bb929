//! Dense reference for the consensus projection, for tests only.
//!
//! Materializes R as stacked canonical-basis rows and forms
//! `R (RᵀR)⁻¹ Rᵀ` with generic dense products and a Gauss–Jordan inverse.
//! It shares nothing with the stitch/extract path beyond the patch
//! footprints, so it can check that path.

use super::PatchGrid;
use crate::error::{PacoError, Result};

/// Largest m·n accepted by [`dense_projection_oracle`].
pub const ORACLE_MAX_DIM: usize = 10_000;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.at(i, i)).sum()
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Option<DenseMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = DenseMatrix::zeros(n, n);
        for i in 0..n {
            inv.set(i, i, 1.0);
        }
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| a.at(x, col).abs().total_cmp(&a.at(y, col).abs()))?;
            if a.at(pivot, col).abs() < 1e-300 {
                return None;
            }
            for j in 0..n {
                a.data.swap(col * n + j, pivot * n + j);
                inv.data.swap(col * n + j, pivot * n + j);
            }
            let p = a.at(col, col);
            for j in 0..n {
                a.data[col * n + j] /= p;
                inv.data[col * n + j] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.at(r, col);
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.data[r * n + j] -= f * a.at(col, j);
                    inv.data[r * n + j] -= f * inv.at(col, j);
                }
            }
        }
        Some(inv)
    }
}

/// The extraction operator R as an explicit `(m·n) × N` 0/1 matrix. Row
/// `j·m + k` selects the k-th sample of patch j, matching the column-major
/// layout of [`super::PatchMatrix`].
pub fn dense_extraction(grid: &PatchGrid) -> Result<DenseMatrix> {
    let dim = grid.patch_len() * grid.patch_count();
    if dim > ORACLE_MAX_DIM {
        return Err(PacoError::param(format!(
            "dense oracle limited to m·n ≤ {ORACLE_MAX_DIM}, grid has {dim}"
        )));
    }
    let m = grid.patch_len();
    let mut r = DenseMatrix::zeros(dim, grid.signal_len());
    for j in 0..grid.patch_count() {
        for (k, i) in grid.footprint(j).enumerate() {
            r.set(j * m + k, i, 1.0);
        }
    }
    Ok(r)
}

/// `R (RᵀR)⁻¹ Rᵀ`, the orthogonal projector onto the consensus subspace.
pub fn dense_projection_oracle(grid: &PatchGrid) -> Result<DenseMatrix> {
    let r = dense_extraction(grid)?;
    let rt = r.transpose();
    let gram = rt.matmul(&r);
    let gram_inv = gram
        .inverse()
        .ok_or_else(|| PacoError::param("RᵀR is singular: some sample is not covered"))?;
    Ok(r.matmul(&gram_inv).matmul(&rt))
}

use crate::error::{PacoError, Result};
use crate::exec;

/// Patches stored as the columns of a `rows × cols` matrix, column-major.
///
/// Holds patch-space iterates (one signal patch per column) as well as
/// coefficient-space ones (one coefficient vector per column).
#[derive(Debug, Clone, PartialEq)]
pub struct PatchMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PatchMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PatchMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(PacoError::shape(format!(
                "{} values for a {rows}x{cols} patch matrix",
                data.len()
            )));
        }
        Ok(PatchMatrix { rows, cols, data })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(PacoError::shape("columns of unequal length"));
        }
        Ok(PatchMatrix {
            rows,
            cols: columns.len(),
            data: columns.concat(),
        })
    }

    /// Patch length (m, or p in coefficient space).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Patch count (n).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn same_dims(&self, other: &PatchMatrix) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }


    /// Columns `idx` in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> PatchMatrix {
        let mut out = PatchMatrix::zeros(self.rows, idx.len());
        for (c, &j) in idx.iter().enumerate() {
            out.column_mut(c).copy_from_slice(self.column(j));
        }
        out
    }

    /// Elementwise `f(self, other)`.
    pub fn zip_map(&self, other: &PatchMatrix, f: impl Fn(f64, f64) -> f64 + Sync + Send) -> PatchMatrix {
        debug_assert!(self.same_dims(other));
        let mut out = PatchMatrix::zeros(self.rows, self.cols);
        let rows = self.rows;
        exec::for_each_chunk(&mut out.data, rows, |j, col| {
            let a = &self.data[j * rows..(j + 1) * rows];
            let b = &other.data[j * rows..(j + 1) * rows];
            for ((o, &x), &y) in col.iter_mut().zip(a).zip(b) {
                *o = f(x, y);
            }
        });
        out
    }

    pub fn add(&self, other: &PatchMatrix) -> PatchMatrix {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PatchMatrix) -> PatchMatrix {
        self.zip_map(other, |a, b| a - b)
    }

    /// Per-column sums of `f(self_ij, other_ij)`, then summed in column order.
    fn pair_sum(&self, other: &PatchMatrix, f: impl Fn(f64, f64) -> f64 + Sync + Send) -> f64 {
        debug_assert!(self.same_dims(other));
        let rows = self.rows;
        exec::ordered_sum(self.cols, |j| {
            let a = &self.data[j * rows..(j + 1) * rows];
            let b = &other.data[j * rows..(j + 1) * rows];
            a.iter().zip(b).map(|(&x, &y)| f(x, y)).sum()
        })
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &PatchMatrix) -> f64 {
        self.pair_sum(other, |a, b| a * b)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// ‖self − other‖_F
    pub fn distance(&self, other: &PatchMatrix) -> f64 {
        self.pair_sum(other, |a, b| (a - b) * (a - b)).sqrt()
    }

    pub fn max_abs_diff(&self, other: &PatchMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

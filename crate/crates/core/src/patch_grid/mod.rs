//! Patch extraction and stitching over N-dimensional grids.
//!
//! `extract` (R) maps a signal to the patch matrix holding every patch as a
//! column. `stitch` (S) maps a patch matrix back by averaging every sample's
//! estimates. S is a left inverse of R, and `R∘S` is the orthogonal
//! projection of patch space onto the consensus subspace (the image of R).
//! That projection never needs R as a matrix: stitch, then re-extract.
//!
//! Grids built by [`PatchGrid::build`] are Cartesian products of per-axis
//! origin lists. Stitching those is a per-sample gather, so it parallelizes
//! without shared writes. Arbitrary origin lists ([`PatchGrid::from_origins`])
//! stitch with a sequential scatter. Both visit a sample's covering patches
//! in increasing column order, so they round identically.

mod matrix;
pub mod oracle;

pub use matrix::PatchMatrix;
pub use oracle::dense_projection_oracle;

use crate::error::{PacoError, Result};
use crate::exec;
use crate::ndsignal::{Mask, Signal};

/// Largest supported number of signal axes.
pub const MAX_AXES: usize = 8;

const NO_COLUMN: u32 = u32::MAX;

#[derive(Debug, Clone)]
enum Layout {
    Product {
        /// Sorted patch origins along each axis.
        axis_origins: Vec<Vec<usize>>,
        /// For each axis and coordinate, the half-open range of indices into
        /// `axis_origins[a]` whose patches cover that coordinate.
        cover: Vec<Vec<(u32, u32)>>,
    },
    Custom,
}

/// The patch layout of a signal: which patches exist and how they overlap.
#[derive(Debug, Clone)]
pub struct PatchGrid {
    signal_shape: Vec<usize>,
    patch_shape: Vec<usize>,
    strides: Option<Vec<usize>>,
    signal_strides: Vec<usize>,
    patch_strides: Vec<usize>,
    /// Linear signal index of each patch origin, in column order.
    origin_index: Vec<usize>,
    /// Linear signal offset of each patch element relative to its origin.
    offsets: Vec<usize>,
    multiplicity: Vec<u32>,
    layout: Layout,
}

/// Patches split by whether they touch a missing sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivePatches {
    /// Patches whose footprint intersects the missing set.
    pub active: Vec<usize>,
    /// Patches made only of observed samples (O′).
    pub complete: Vec<usize>,
}

fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * shape[a + 1];
    }
    s
}

fn axis_origins(extent: usize, patch: usize, stride: usize) -> Vec<usize> {
    let last = extent - patch;
    let mut o: Vec<usize> = (0..=last).step_by(stride).collect();
    if *o.last().expect("origin 0 always present") != last {
        o.push(last);
    }
    o
}

impl PatchGrid {
    /// Regular grid: origins at every multiple of the stride on each axis,
    /// plus one patch flush with the far boundary when the stride does not
    /// land there, so every sample is covered.
    pub fn build(signal_shape: &[usize], patch_shape: &[usize], strides: &[usize]) -> Result<Self> {
        check_shapes(signal_shape, patch_shape)?;
        if strides.len() != signal_shape.len() || strides.contains(&0) {
            return Err(PacoError::param(format!(
                "strides {strides:?} must be positive, one per axis"
            )));
        }
        let d = signal_shape.len();
        let axis_origins: Vec<Vec<usize>> = (0..d)
            .map(|a| axis_origins(signal_shape[a], patch_shape[a], strides[a]))
            .collect();
        let cover: Vec<Vec<(u32, u32)>> = (0..d)
            .map(|a| {
                let o = &axis_origins[a];
                (0..signal_shape[a])
                    .map(|c| {
                        // origins are sorted: covering ones form a contiguous run
                        let lo = o.partition_point(|&x| x + patch_shape[a] <= c);
                        let hi = o.partition_point(|&x| x <= c);
                        (lo as u32, hi as u32)
                    })
                    .collect()
            })
            .collect();

        let signal_strides = row_major_strides(signal_shape);
        let counts: Vec<usize> = axis_origins.iter().map(Vec::len).collect();
        let n: usize = counts.iter().product();
        let count_strides = row_major_strides(&counts);
        let origin_index = (0..n)
            .map(|j| {
                (0..d)
                    .map(|a| axis_origins[a][(j / count_strides[a]) % counts[a]] * signal_strides[a])
                    .sum()
            })
            .collect();

        let total: usize = signal_shape.iter().product();
        let multiplicity = (0..total)
            .map(|i| {
                (0..d)
                    .map(|a| {
                        let (lo, hi) = cover[a][(i / signal_strides[a]) % signal_shape[a]];
                        hi - lo
                    })
                    .product()
            })
            .collect();

        Ok(PatchGrid {
            signal_shape: signal_shape.to_vec(),
            patch_shape: patch_shape.to_vec(),
            strides: Some(strides.to_vec()),
            patch_strides: row_major_strides(patch_shape),
            offsets: patch_offsets(patch_shape, &signal_strides),
            signal_strides,
            origin_index,
            multiplicity,
            layout: Layout::Product {
                axis_origins,
                cover,
            },
        })
    }

    /// Grid from an explicit list of patch origins. Origins are sorted
    /// lexicographically; duplicates, out-of-bounds patches and uncovered
    /// samples are rejected.
    pub fn from_origins(signal_shape: &[usize], patch_shape: &[usize], mut origins: Vec<Vec<usize>>) -> Result<Self> {
        check_shapes(signal_shape, patch_shape)?;
        let d = signal_shape.len();
        for o in &origins {
            if o.len() != d || (0..d).any(|a| o[a] + patch_shape[a] > signal_shape[a]) {
                return Err(PacoError::param(format!(
                    "origin {o:?} does not place a {patch_shape:?} patch inside {signal_shape:?}"
                )));
            }
        }
        origins.sort();
        if origins.windows(2).any(|w| w[0] == w[1]) {
            return Err(PacoError::param("duplicate patch origins"));
        }
        let signal_strides = row_major_strides(signal_shape);
        let offsets = patch_offsets(patch_shape, &signal_strides);
        let origin_index: Vec<usize> = origins
            .iter()
            .map(|o| o.iter().zip(&signal_strides).map(|(c, s)| c * s).sum())
            .collect();
        let total: usize = signal_shape.iter().product();
        let mut multiplicity = vec![0u32; total];
        for &base in &origin_index {
            for &off in &offsets {
                multiplicity[base + off] += 1;
            }
        }
        if let Some(i) = multiplicity.iter().position(|&c| c == 0) {
            return Err(PacoError::param(format!(
                "sample {i} is not covered by any patch"
            )));
        }
        Ok(PatchGrid {
            signal_shape: signal_shape.to_vec(),
            patch_shape: patch_shape.to_vec(),
            strides: None,
            patch_strides: row_major_strides(patch_shape),
            signal_strides,
            origin_index,
            offsets,
            multiplicity,
            layout: Layout::Custom,
        })
    }

    pub fn signal_shape(&self) -> &[usize] {
        &self.signal_shape
    }

    pub fn patch_shape(&self) -> &[usize] {
        &self.patch_shape
    }

    /// `None` for grids built from an explicit origin list.
    pub fn strides(&self) -> Option<&[usize]> {
        self.strides.as_deref()
    }

    /// m
    pub fn patch_len(&self) -> usize {
        self.offsets.len()
    }

    /// n
    pub fn patch_count(&self) -> usize {
        self.origin_index.len()
    }

    /// N
    pub fn signal_len(&self) -> usize {
        self.multiplicity.len()
    }

    /// Number of patches covering each sample (the diagonal of RᵀR).
    pub fn multiplicity(&self) -> &[u32] {
        &self.multiplicity
    }

    /// Coordinates of patch `j`'s origin.
    pub fn origin(&self, j: usize) -> Vec<usize> {
        let base = self.origin_index[j];
        (0..self.signal_shape.len())
            .map(|a| (base / self.signal_strides[a]) % self.signal_shape[a])
            .collect()
    }

    /// Linear signal indices covered by patch `j`, in patch row-major order.
    pub fn footprint(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        let base = self.origin_index[j];
        self.offsets.iter().map(move |&o| base + o)
    }

    fn check_signal(&self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.signal_len() {
            return Err(PacoError::shape(format!(
                "{} samples for a grid over {:?}",
                samples.len(),
                self.signal_shape
            )));
        }
        Ok(())
    }

    fn check_patches(&self, y: &PatchMatrix) -> Result<()> {
        if y.rows() != self.patch_len() || y.cols() != self.patch_count() {
            return Err(PacoError::shape(format!(
                "patch matrix is {}x{}, grid expects {}x{}",
                y.rows(),
                y.cols(),
                self.patch_len(),
                self.patch_count()
            )));
        }
        Ok(())
    }

    /// R: every patch as a column, read in row-major order.
    pub fn extract(&self, signal: &Signal) -> Result<PatchMatrix> {
        if signal.shape() != self.signal_shape.as_slice() {
            return Err(PacoError::shape(format!(
                "signal {:?} vs grid {:?}",
                signal.shape(),
                self.signal_shape
            )));
        }
        Ok(self.extract_samples(signal.samples()))
    }

    /// R applied to raw row-major samples (length must equal N).
    pub fn extract_samples(&self, samples: &[f64]) -> PatchMatrix {
        assert_eq!(samples.len(), self.signal_len(), "sample count");
        let mut out = PatchMatrix::zeros(self.patch_len(), self.patch_count());
        let m = self.patch_len();
        exec::for_each_chunk(out.as_mut_slice(), m, |j, col| {
            self.extract_column(j, samples, col);
        });
        out
    }

    /// Writes patch `j` of `samples` into `out`.
    pub fn extract_column(&self, j: usize, samples: &[f64], out: &mut [f64]) {
        let base = self.origin_index[j];
        for (o, &off) in out.iter_mut().zip(&self.offsets) {
            *o = samples[base + off];
        }
    }

    /// S: average of every sample's estimates across the patches covering it.
    pub fn stitch(&self, y: &PatchMatrix, peak: f64) -> Result<Signal> {
        let samples = self.stitch_samples(y)?;
        Signal::new(self.signal_shape.clone(), samples, peak)
    }

    /// S returning raw row-major samples.
    pub fn stitch_samples(&self, y: &PatchMatrix) -> Result<Vec<f64>> {
        self.check_patches(y)?;
        let mut out = vec![0.0; self.signal_len()];
        if self.multiplicity.iter().all(|&c| c == 1) {
            // no overlap: each sample has exactly one estimate
            for j in 0..self.patch_count() {
                for (&v, i) in y.column(j).iter().zip(self.footprint(j)) {
                    out[i] = v;
                }
            }
            return Ok(out);
        }
        match &self.layout {
            Layout::Product { .. } => {
                let m = self.patch_len();
                let data = y.as_slice();
                exec::for_each_chunk(&mut out, STITCH_CHUNK, |c, chunk| {
                    let start = c * STITCH_CHUNK;
                    for (k, o) in chunk.iter_mut().enumerate() {
                        let i = start + k;
                        let mut acc = 0.0;
                        self.for_each_cover(i, |j, off| acc += data[j * m + off]);
                        *o = acc / f64::from(self.multiplicity[i]);
                    }
                });
            }
            Layout::Custom => {
                for j in 0..self.patch_count() {
                    for (&v, i) in y.column(j).iter().zip(self.footprint(j)) {
                        out[i] += v;
                    }
                }
                for (o, &c) in out.iter_mut().zip(&self.multiplicity) {
                    *o /= f64::from(c);
                }
            }
        }
        Ok(out)
    }

    /// Stitches only the samples listed in `indices` into `out`, from a
    /// matrix holding just the patches in `columns` (sorted, each column `c`
    /// of `y` is patch `columns[c]`). Every patch covering a listed sample
    /// must be present. Rounds identically to [`PatchGrid::stitch_samples`].
    pub fn stitch_subset(&self, y: &PatchMatrix, columns: &[usize], indices: &[usize], out: &mut [f64]) -> Result<()> {
        self.check_signal(out)?;
        if y.rows() != self.patch_len() || y.cols() != columns.len() {
            return Err(PacoError::shape("patch subset does not match column list"));
        }
        let mut col_of = vec![NO_COLUMN; self.patch_count()];
        for (c, &j) in columns.iter().enumerate() {
            col_of[j] = c as u32;
        }
        let m = self.patch_len();
        let data = y.as_slice();
        match &self.layout {
            Layout::Product { .. } => {
                let values = exec::map_indices(indices.len(), |t| {
                    let i = indices[t];
                    let mut acc = 0.0;
                    let mut missing = false;
                    self.for_each_cover(i, |j, off| {
                        let c = col_of[j];
                        if c == NO_COLUMN {
                            missing = true;
                        } else {
                            acc += data[c as usize * m + off];
                        }
                    });
                    (!missing).then(|| acc / f64::from(self.multiplicity[i]))
                });
                for (&i, v) in indices.iter().zip(values) {
                    out[i] = v.ok_or_else(|| {
                        PacoError::shape(format!("sample {i} is covered by a patch outside the subset"))
                    })?;
                }
            }
            Layout::Custom => {
                let mut acc = vec![0.0; self.signal_len()];
                let mut seen = vec![0u32; self.signal_len()];
                for (c, &j) in columns.iter().enumerate() {
                    for (&v, i) in data[c * m..(c + 1) * m].iter().zip(self.footprint(j)) {
                        acc[i] += v;
                        seen[i] += 1;
                    }
                }
                for &i in indices {
                    if seen[i] != self.multiplicity[i] {
                        return Err(PacoError::shape(format!(
                            "sample {i} is covered by a patch outside the subset"
                        )));
                    }
                    out[i] = acc[i] / f64::from(self.multiplicity[i]);
                }
            }
        }
        Ok(())
    }

    /// Calls `f(patch, offset_in_patch)` for every patch covering sample `i`,
    /// in increasing patch order. Product layouts only.
    fn for_each_cover(&self, i: usize, mut f: impl FnMut(usize, usize)) {
        let Layout::Product { axis_origins, cover } = &self.layout else {
            unreachable!("gather needs a product layout");
        };
        let d = self.signal_shape.len();
        let mut coord = [0usize; MAX_AXES];
        let mut lo = [0usize; MAX_AXES];
        let mut hi = [0usize; MAX_AXES];
        let mut count_stride = [0usize; MAX_AXES];
        let mut stride = 1;
        for a in (0..d).rev() {
            coord[a] = (i / self.signal_strides[a]) % self.signal_shape[a];
            let (l, h) = cover[a][coord[a]];
            lo[a] = l as usize;
            hi[a] = h as usize;
            count_stride[a] = stride;
            stride *= axis_origins[a].len();
        }
        let mut idx = lo;
        loop {
            let mut j = 0;
            let mut off = 0;
            for a in 0..d {
                j += idx[a] * count_stride[a];
                off += (coord[a] - axis_origins[a][idx[a]]) * self.patch_strides[a];
            }
            f(j, off);
            // odometer over the covering ranges, last axis fastest
            let mut a = d;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < hi[a] {
                    break;
                }
                idx[a] = lo[a];
            }
        }
    }

    /// Π_C = R∘S, the orthogonal projection onto the consensus subspace.
    pub fn project_consensus(&self, y: &PatchMatrix) -> Result<PatchMatrix> {
        let v = self.stitch_samples(y)?;
        Ok(self.extract_samples(&v))
    }

    /// Π_{C∩Ω}: stitch, apply the signal-space constraint, re-extract.
    pub fn project_constrained(&self, y: &PatchMatrix, constraint: &SignalConstraint) -> Result<PatchMatrix> {
        constraint.check_len(self.signal_len())?;
        let mut v = self.stitch_samples(y)?;
        constraint.apply(&mut v);
        Ok(self.extract_samples(&v))
    }

    /// Projection onto consensus patches whose signal matches `known` on the
    /// observed samples of `mask`.
    pub fn project_consensus_omega(&self, y: &PatchMatrix, mask: &Mask, known: &Signal) -> Result<PatchMatrix> {
        let c = SignalConstraint::observed(mask, known)?;
        self.project_constrained(y, &c)
    }

    /// Projection onto consensus patches whose signal lies in `[lo, hi]`.
    pub fn clip_project(&self, y: &PatchMatrix, lo: f64, hi: f64) -> Result<PatchMatrix> {
        let c = SignalConstraint::none().with_clip(lo, hi)?;
        self.project_constrained(y, &c)
    }

    /// Splits patches into those touching a missing sample and complete ones.
    pub fn active_patches(&self, mask: &Mask) -> Result<ActivePatches> {
        mask.check_shape(&self.signal_shape)?;
        let known = mask.known();
        let touches = exec::map_indices(self.patch_count(), |j| {
            self.footprint(j).any(|i| !known[i])
        });
        let (active, complete): (Vec<usize>, Vec<usize>) =
            (0..self.patch_count()).partition(|&j| touches[j]);
        Ok(ActivePatches { active, complete })
    }
}

const STITCH_CHUNK: usize = 1024;

fn check_shapes(signal_shape: &[usize], patch_shape: &[usize]) -> Result<()> {
    if signal_shape.is_empty() || signal_shape.len() > MAX_AXES {
        return Err(PacoError::shape(format!(
            "signals need 1 to {MAX_AXES} axes, got {signal_shape:?}"
        )));
    }
    if patch_shape.len() != signal_shape.len() {
        return Err(PacoError::shape(format!(
            "patch {patch_shape:?} and signal {signal_shape:?} differ in rank"
        )));
    }
    if patch_shape.contains(&0) {
        return Err(PacoError::param("patch extents must be positive"));
    }
    if patch_shape.iter().zip(signal_shape).any(|(p, s)| p > s) {
        return Err(PacoError::param(format!(
            "patch {patch_shape:?} is larger than signal {signal_shape:?}"
        )));
    }
    Ok(())
}

fn patch_offsets(patch_shape: &[usize], signal_strides: &[usize]) -> Vec<usize> {
    let m: usize = patch_shape.iter().product();
    let ps = row_major_strides(patch_shape);
    (0..m)
        .map(|k| {
            (0..patch_shape.len())
                .map(|a| ((k / ps[a]) % patch_shape[a]) * signal_strides[a])
                .sum()
        })
        .collect()
}

/// Convex constraints applied in signal space between stitching and
/// re-extraction: observed samples are fixed, and optionally every sample
/// is clamped to a range.
#[derive(Debug, Clone, Default)]
pub struct SignalConstraint {
    len: Option<usize>,
    known_index: Vec<usize>,
    known_value: Vec<f64>,
    clip: Option<(f64, f64)>,
}

impl SignalConstraint {
    /// No constraint: the projection is plain Π_C.
    pub fn none() -> Self {
        SignalConstraint::default()
    }

    /// Fix the samples observed in `mask` to the values of `known`.
    pub fn observed(mask: &Mask, known: &Signal) -> Result<Self> {
        mask.check_shape(known.shape())?;
        let known_index = mask.known_indices();
        let known_value = known_index.iter().map(|&i| known.samples()[i]).collect();
        Ok(SignalConstraint {
            len: Some(mask.len()),
            known_index,
            known_value,
            clip: None,
        })
    }

    /// Adds a range constraint. Observed values must already lie in range.
    pub fn with_clip(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(PacoError::param(format!("clip range [{lo}, {hi}] is empty")));
        }
        if let Some(v) = self.known_value.iter().find(|&&v| v < lo || v > hi) {
            return Err(PacoError::param(format!(
                "observed value {v} lies outside the clip range [{lo}, {hi}]"
            )));
        }
        self.clip = Some((lo, hi));
        Ok(self)
    }

    pub fn clip(&self) -> Option<(f64, f64)> {
        self.clip
    }

    fn check_len(&self, n: usize) -> Result<()> {
        match self.len {
            Some(l) if l != n => Err(PacoError::shape(format!(
                "constraint covers {l} samples, grid has {n}"
            ))),
            _ => Ok(()),
        }
    }

    /// Projects a signal onto the constraint set in place.
    pub fn apply(&self, samples: &mut [f64]) {
        for (&i, &v) in self.known_index.iter().zip(&self.known_value) {
            samples[i] = v;
        }
        if let Some((lo, hi)) = self.clip {
            for s in samples.iter_mut() {
                *s = s.clamp(lo, hi);
            }
        }
    }
}

//! DCT-domain weighted-ℓ1 inpainting.
//!
//! Every patch is modeled by its orthonormal DCT coefficients with a
//! Laplacian prior whose rate is estimated per coefficient from the patches
//! that contain no missing samples. The solver is scaled-dual ADMM in the
//! coefficient domain:
//!
//! ```text
//! A  ← T_{λw}(Z − U)          weighted soft-thresholding
//! Ŷ  ← Dᵀ(A + U)              back to patch space
//! x̂  ← S(Ŷ)                   average-stitch
//! x̂ᵢ ← xᵢ for observed i      (then clip, if requested)
//! Z  ← D R(x̂)                 re-extract and transform
//! U  ← U + A − Z
//! ```
//!
//! Patches that touch no missing sample are decoupled from the rest: their
//! stitched samples are always overwritten by observations. Trace
//! diagnostics (cost, constraint violation, argument change) are therefore
//! measured over the patches that touch a missing sample, and
//! [`inpaint_partial`] skips the other patches entirely while producing the
//! same output as [`inpaint`].

use crate::error::{PacoError, Result};
use crate::exec;
use crate::metrics::MetricReport;
use crate::ndsignal::{Mask, Signal};
use crate::patch_grid::{PatchGrid, PatchMatrix, SignalConstraint};
use crate::solver::{check_stop, IterationRecord, PenaltySchedule, SolverTrace, StopCriteria};
use crate::transforms::OrthoDct;

/// Columns transformed at a time during weight estimation.
const WEIGHT_CHUNK: usize = 4096;

/// `T_{λw}(a) = min(a + λw, max(0, a − λw))`, with weight `w_i` on row `i`.
pub fn soft_threshold(a: &PatchMatrix, weights: &[f64], lambda: f64) -> PatchMatrix {
    assert_eq!(weights.len(), a.rows(), "one weight per coefficient row");
    let mut out = a.clone();
    let rows = a.rows();
    exec::for_each_chunk(out.as_mut_slice(), rows, |_, col| {
        for (v, &w) in col.iter_mut().zip(weights) {
            *v = shrink(*v, lambda * w);
        }
    });
    out
}

#[inline]
fn shrink(a: f64, t: f64) -> f64 {
    (a + t).min((a - t).max(0.0))
}

fn column_l1(a: &PatchMatrix, j: usize, w: &[f64]) -> f64 {
    a.column(j).iter().zip(w).map(|(v, w)| w * v.abs()).sum()
}

/// `Σ_{i,j} w_i |a_ij|`, summed per column and then in column order.
pub fn weighted_l1(a: &PatchMatrix, weights: &[f64]) -> f64 {
    assert_eq!(weights.len(), a.rows(), "one weight per coefficient row");
    exec::ordered_sum(a.cols(), |j| column_l1(a, j, weights))
}

/// Per-coefficient Laplacian rates `w_i = 1/(mean_j |a_ij| + ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianWeights {
    pub w: Vec<f64>,
    pub epsilon: f64,
}

impl LaplacianWeights {
    /// Weights from mean absolute coefficients.
    pub fn from_means(means: &[f64], epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(PacoError::param(format!("epsilon must be positive, got {epsilon}")));
        }
        if means.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(PacoError::param("mean coefficient magnitudes must be finite and nonnegative"));
        }
        Ok(LaplacianWeights {
            w: means.iter().map(|b| 1.0 / (b + epsilon)).collect(),
            epsilon,
        })
    }

    /// User-supplied weights; must be finite and nonnegative.
    pub fn custom(w: Vec<f64>) -> Result<Self> {
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(PacoError::param("weights must be finite and nonnegative"));
        }
        Ok(LaplacianWeights { w, epsilon: 0.0 })
    }

    /// Default floor `1e-3·α/√m`.
    pub fn default_epsilon(peak: f64, patch_len: usize) -> f64 {
        1e-3 * peak / (patch_len as f64).sqrt()
    }
}

/// Estimates weights from the patches of `signal` free of missing samples.
pub fn estimate_weights(grid: &PatchGrid, dct: &OrthoDct, signal: &Signal, mask: &Mask) -> Result<LaplacianWeights> {
    check_inputs(grid, dct, signal, mask)?;
    let complete = grid.active_patches(mask)?.complete;
    if complete.is_empty() {
        return Err(PacoError::NoCompletePatches);
    }
    let m = grid.patch_len();
    let mut sums = vec![0.0; m];
    for chunk in complete.chunks(WEIGHT_CHUNK) {
        let coeffs = coefficients_of(grid, dct, signal.samples(), chunk);
        for c in 0..coeffs.cols() {
            for (s, v) in sums.iter_mut().zip(coeffs.column(c)) {
                *s += v.abs();
            }
        }
    }
    let count = complete.len() as f64;
    let means: Vec<f64> = sums.iter().map(|s| s / count).collect();
    LaplacianWeights::from_means(&means, LaplacianWeights::default_epsilon(signal.peak(), m))
}

fn check_inputs(grid: &PatchGrid, dct: &OrthoDct, signal: &Signal, mask: &Mask) -> Result<()> {
    mask.check_shape(signal.shape())?;
    if grid.signal_shape() != signal.shape() {
        return Err(PacoError::shape(format!(
            "grid over {:?} applied to a signal of shape {:?}",
            grid.signal_shape(),
            signal.shape()
        )));
    }
    if dct.patch_shape() != grid.patch_shape() {
        return Err(PacoError::shape("transform and grid disagree on the patch shape"));
    }
    Ok(())
}

/// `D R(x)` restricted to the patches in `columns`.
fn coefficients_of(grid: &PatchGrid, dct: &OrthoDct, samples: &[f64], columns: &[usize]) -> PatchMatrix {
    let m = grid.patch_len();
    let mut out = PatchMatrix::zeros(m, columns.len());
    exec::for_each_chunk(out.as_mut_slice(), m, |c, col| {
        grid.extract_column(columns[c], samples, col);
    });
    dct.forward_in_place(&mut out).expect("patch length matches the transform");
    out
}

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct InpaintConfig {
    pub patch_shape: Vec<usize>,
    pub strides: Vec<usize>,
    pub kappa: f64,
    pub shrink: f64,
    /// Halve λ whenever the cost rises; when false λ stays at κα.
    pub adaptive_penalty: bool,
    pub max_iter: usize,
    pub tol: f64,
    pub clip: Option<(f64, f64)>,
    pub partial_updates: bool,
    /// Overrides weight estimation when set.
    pub weights: Option<LaplacianWeights>,
}

impl InpaintConfig {
    pub const IMAGE_MAX_ITER: usize = 256;
    pub const AUDIO_MAX_ITER: usize = 1024;
    pub const DEFAULT_TOL: f64 = 1e-8;

    pub fn new(patch_shape: Vec<usize>, strides: Vec<usize>) -> Self {
        InpaintConfig {
            patch_shape,
            strides,
            kappa: PenaltySchedule::DEFAULT_KAPPA,
            shrink: PenaltySchedule::DEFAULT_SHRINK,
            adaptive_penalty: true,
            max_iter: Self::IMAGE_MAX_ITER,
            tol: Self::DEFAULT_TOL,
            clip: None,
            partial_updates: true,
            weights: None,
        }
    }

    /// 16×16 patches, stride 2.
    pub fn image() -> Self {
        InpaintConfig::new(vec![16, 16], vec![2, 2])
    }

    /// Windows of 4096 samples with 1/32 overlap, 1024 iterations.
    pub fn audio() -> Self {
        InpaintConfig {
            max_iter: Self::AUDIO_MAX_ITER,
            ..InpaintConfig::new(vec![4096], vec![4096 - 4096 / 32])
        }
    }

    /// 4×8×8 patches (frames × rows × columns), strides 1, 2, 2.
    pub fn video() -> Self {
        InpaintConfig::new(vec![4, 8, 8], vec![1, 2, 2])
    }

    pub fn with_clip(mut self, lo: f64, hi: f64) -> Self {
        self.clip = Some((lo, hi));
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn stop(&self) -> Result<StopCriteria> {
        StopCriteria::new(self.max_iter, self.tol)
    }
}

/// Result of an inpainting run.
#[derive(Debug, Clone)]
pub struct InpaintOutput {
    pub signal: Signal,
    pub trace: SolverTrace,
    pub iterations: usize,
    pub weights: LaplacianWeights,
    /// Patches touching a missing sample, in column order.
    pub active: Vec<usize>,
    /// Final coefficients A of the `active` patches.
    pub coefficients: PatchMatrix,
}

/// Restores the missing samples of `signal` (those not known in `mask`).
/// Runs on every patch, or only on patches touching a missing sample when
/// `config.partial_updates` is set; both give the same output.
pub fn inpaint(signal: &Signal, mask: &Mask, config: &InpaintConfig) -> Result<InpaintOutput> {
    run(signal, mask, config, config.partial_updates, None)
}

/// [`inpaint`] restricted to the patches touching a missing sample,
/// regardless of `config.partial_updates`.
pub fn inpaint_partial(signal: &Signal, mask: &Mask, config: &InpaintConfig) -> Result<InpaintOutput> {
    run(signal, mask, config, true, None)
}

/// [`inpaint`] with every iteration's estimate scored against `reference`.
pub fn inpaint_traced(
    signal: &Signal,
    mask: &Mask,
    config: &InpaintConfig,
    reference: Option<&Signal>,
) -> Result<InpaintOutput> {
    if let Some(r) = reference {
        if r.shape() != signal.shape() {
            return Err(PacoError::shape(format!(
                "reference {:?} differs from input {:?}",
                r.shape(),
                signal.shape()
            )));
        }
    }
    run(signal, mask, config, config.partial_updates, reference)
}

fn ensure_finite(values: &[f64], stage: &'static str, iteration: usize) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(PacoError::NonFinite { stage, iteration })
    }
}

fn run(
    signal: &Signal,
    mask: &Mask,
    config: &InpaintConfig,
    partial: bool,
    reference: Option<&Signal>,
) -> Result<InpaintOutput> {
    let grid = PatchGrid::build(signal.shape(), &config.patch_shape, &config.strides)?;
    let dct = OrthoDct::new(&config.patch_shape)?;
    check_inputs(&grid, &dct, signal, mask)?;
    ensure_finite(signal.samples(), "input signal", 0)?;
    let alpha = signal.peak();
    let mut schedule = PenaltySchedule::new(config.kappa, config.shrink, alpha)?;
    if !config.adaptive_penalty {
        schedule = PenaltySchedule::frozen(config.kappa, alpha)?;
    }
    let stop = config.stop()?;
    let weights = match &config.weights {
        Some(w) if w.w.len() != grid.patch_len() => {
            return Err(PacoError::shape(format!(
                "{} weights for patches of {} samples",
                w.w.len(),
                grid.patch_len()
            )))
        }
        Some(w) => w.clone(),
        None => estimate_weights(&grid, &dct, signal, mask)?,
    };
    let mut constraint = SignalConstraint::observed(mask, signal)?;
    if let Some((lo, hi)) = config.clip {
        constraint = constraint.with_clip(lo, hi)?;
    }

    let active = grid.active_patches(mask)?.active;
    let m = grid.patch_len();
    let mut trace = SolverTrace::new(alpha, m * active.len());
    if partial && active.is_empty() {
        return Ok(InpaintOutput {
            signal: signal.clone(),
            trace,
            iterations: 0,
            weights,
            active,
            coefficients: PatchMatrix::zeros(m, 0),
        });
    }

    let missing = mask.missing_indices();
    let mut x = signal.samples().to_vec();
    if !missing.is_empty() {
        let known = mask.known_indices();
        let mean = known.iter().map(|&i| x[i]).sum::<f64>() / known.len() as f64;
        for &i in &missing {
            x[i] = mean;
        }
        constraint.apply(&mut x);
    }

    // Held columns: all patches, or only the active ones.
    let all: Vec<usize>;
    let (held, diag): (&[usize], Vec<usize>) = if partial {
        (&active, (0..active.len()).collect())
    } else {
        all = (0..grid.patch_count()).collect();
        (&all, active.clone())
    };

    let w = &weights.w;
    let mut z = coefficients_of(&grid, &dct, &x, held);
    let mut a = z.clone();
    let mut u = PatchMatrix::zeros(m, held.len());
    let mut prev_cost = f64::INFINITY;

    loop {
        let t = trace.len() + 1;
        let lambda = schedule.lambda();

        // (a) A ← T_{λw}(Z − U)
        let a_next = {
            let mut out = PatchMatrix::zeros(m, held.len());
            exec::for_each_chunk(out.as_mut_slice(), m, |j, col| {
                let (zj, uj) = (z.column(j), u.column(j));
                for (i, o) in col.iter_mut().enumerate() {
                    *o = shrink(zj[i] - uj[i], lambda * w[i]);
                }
            });
            out
        };
        ensure_finite(a_next.as_slice(), "thresholding step", t)?;

        // (b) Ŷ ← Dᵀ(A + U)
        let mut y_hat = a_next.add(&u);
        dct.inverse_in_place(&mut y_hat)?;

        // (c), (d) stitch, then restore observations and clip
        if partial {
            grid.stitch_subset(&y_hat, held, &missing, &mut x)?;
            if let Some((lo, hi)) = constraint.clip() {
                for &i in &missing {
                    x[i] = x[i].clamp(lo, hi);
                }
            }
        } else {
            x = grid.stitch_samples(&y_hat)?;
            constraint.apply(&mut x);
        }
        ensure_finite(&x, "stitching step", t)?;

        // (e) Z ← D R(x̂)
        z = coefficients_of(&grid, &dct, &x, held);

        // (f) U ← U + A − Z
        u = u.zip_map(&a_next.sub(&z), |u, r| u + r);

        let cost = exec::ordered_sum(diag.len(), |c| column_l1(&a_next, diag[c], w));
        let violation = column_distance(&a_next, &z, &diag);
        let arg_change = column_distance(&a_next, &a, &diag);
        let metrics = match reference {
            Some(r) => Some(MetricReport::compute(r, &signal.with_samples(x.clone())?)?),
            None => None,
        };
        trace.records.push(IterationRecord {
            iter: t,
            lambda,
            cost,
            constraint_violation: violation,
            cost_change: cost - prev_cost,
            arg_change,
            metrics,
        });
        prev_cost = cost;
        schedule.update(cost);
        a = a_next;
        if check_stop(&trace, &stop) {
            break;
        }
    }

    let coefficients = if partial { a } else { a.select_columns(&active) };
    Ok(InpaintOutput {
        signal: signal.with_samples(x)?,
        iterations: trace.len(),
        trace,
        weights,
        active,
        coefficients,
    })
}

/// Frobenius distance over the listed columns, summed in list order.
fn column_distance(p: &PatchMatrix, q: &PatchMatrix, columns: &[usize]) -> f64 {
    exec::ordered_sum(columns.len(), |c| {
        let j = columns[c];
        p.column(j)
            .iter()
            .zip(q.column(j))
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    })
    .sqrt()
}

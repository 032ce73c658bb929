//! Patch-consensus restoration.
//!
//! A signal is cut into overlapping patches, each patch is restored under a
//! per-patch prior, and the patches are forced to agree on every shared
//! sample. The agreement constraint is a linear subspace whose orthogonal
//! projection is simply "average-stitch, then re-extract", which makes an
//! ADMM splitting cheap for any patch layout.
//!
//! Modules:
//! - [`ndsignal`] and [`media`]: N-dimensional signals, masks and file I/O.
//! - [`patch_grid`]: extraction, stitching and the consensus projections.
//! - [`transforms`]: orthonormal separable DCT-II and dense dictionaries.
//! - [`solver`]: ADMM, linearized ADMM, Dykstra and the penalty schedule.
//! - [`inpaint`]: DCT-domain weighted-ℓ1 inpainting.
//! - [`metrics`]: RMSE, PSNR, MAD, BIAS and SSIM.
//! - [`maskgen`]: seeded erasure-mask generators.

pub mod error;
pub mod exec;
pub mod inpaint;
pub mod maskgen;
pub mod media;
pub mod metrics;
pub mod ndsignal;
pub mod patch_grid;
pub mod solver;
pub mod transforms;

pub use error::{PacoError, Result};
pub use ndsignal::{devectorize, vectorize, Mask, Signal};
pub use patch_grid::{PatchGrid, PatchMatrix, SignalConstraint};
pub use inpaint::{
    estimate_weights, inpaint, inpaint_partial, inpaint_traced, soft_threshold, weighted_l1, InpaintConfig,
    InpaintOutput, LaplacianWeights,
};
pub use metrics::MetricReport;
pub use solver::{PenaltySchedule, SolverTrace, StopCriteria};
pub use transforms::{Dictionary, OrthoDct};

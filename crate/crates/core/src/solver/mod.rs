//! Consensus-constrained solvers.
//!
//! Problems have the form `min f(Y) s.t. Y ∈ C ∩ Ω` where `f` is a
//! separable patch prior with a computable proximal operator and
//! `Π_{C∩Ω}` is cheap (see [`crate::patch_grid`]). The solvers take both as
//! trait objects so any prior or constraint set can be plugged in.

mod admm;
mod dykstra;
mod ladmm;
mod prox;
mod schedule;
mod trace;

pub use admm::{admm_solve, Admm, AdmmState};
pub use dykstra::{dykstra_project, DykstraOutcome};
pub use ladmm::{ladmm_solve, Ladmm, LadmmState};
pub use prox::{BoxProjector, ConsensusProjector, DctWeightedL1, WeightedL1, ZeroCost};
pub use schedule::{penalty_update, PenaltySchedule};
pub use trace::{check_stop, IterationRecord, SolverTrace, StopCriteria};

use crate::error::Result;
use crate::patch_grid::PatchMatrix;

/// A patch prior `f` and its proximal operator.
pub trait ProxCost: Sync {
    fn cost(&self, y: &PatchMatrix) -> f64;

    /// `argmin_x f(x) + ‖x − v‖² / 2λ`
    fn prox(&self, v: &PatchMatrix, lambda: f64) -> PatchMatrix;
}

/// An exact Euclidean projection onto a closed convex set of patch matrices.
pub trait Projector: Sync {
    fn project(&self, y: &PatchMatrix) -> Result<PatchMatrix>;
}

impl<F> Projector for F
where
    F: Fn(&PatchMatrix) -> Result<PatchMatrix> + Sync,
{
    fn project(&self, y: &PatchMatrix) -> Result<PatchMatrix> {
        self(y)
    }
}

/// Result of an ADMM-family solve.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    /// The feasible iterate Z at termination.
    pub solution: PatchMatrix,
    /// Coefficients (LADMM only; equals `solution` for plain ADMM).
    pub coefficients: PatchMatrix,
    pub trace: SolverTrace,
}

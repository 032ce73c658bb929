use super::{check_stop, IterationRecord, PenaltySchedule, Projector, ProxCost, SolveOutput, SolverTrace, StopCriteria};
use crate::error::{PacoError, Result};
use crate::patch_grid::PatchMatrix;

/// Iterates of the scaled-dual ADMM.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    /// Primal patch iterate.
    pub y: PatchMatrix,
    /// Feasible copy, always in C ∩ Ω.
    pub z: PatchMatrix,
    /// Scaled dual.
    pub u: PatchMatrix,
    pub lambda: f64,
    /// Completed iterations.
    pub iter: usize,
}

/// Stepwise ADMM for `min f(Y) s.t. Y ∈ C ∩ Ω`:
///
/// ```text
/// Y ← prox_{λf}(Z − U)
/// Z ← Π_{C∩Ω}(Y + U)
/// U ← U + Y − Z
/// ```
pub struct Admm<'a> {
    prior: &'a dyn ProxCost,
    projection: &'a dyn Projector,
    schedule: PenaltySchedule,
    stop: StopCriteria,
    state: AdmmState,
    prev_cost: f64,
    trace: SolverTrace,
}

pub(crate) fn ensure_finite(m: &PatchMatrix, stage: &'static str, iteration: usize) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(PacoError::NonFinite { stage, iteration })
    }
}

impl<'a> Admm<'a> {
    /// Starts from `Z⁰ = Π_{C∩Ω}(init)`, `Y⁰ = Z⁰`, `U⁰ = 0`.
    pub fn new(
        prior: &'a dyn ProxCost,
        projection: &'a dyn Projector,
        init: &PatchMatrix,
        schedule: PenaltySchedule,
        stop: StopCriteria,
    ) -> Result<Self> {
        ensure_finite(init, "initial iterate", 0)?;
        let z = projection.project(init)?;
        let prev_cost = prior.cost(&z);
        let trace = SolverTrace::new(schedule.alpha(), z.rows() * z.cols());
        let state = AdmmState {
            y: z.clone(),
            u: PatchMatrix::zeros(z.rows(), z.cols()),
            z,
            lambda: schedule.lambda(),
            iter: 0,
        };
        Ok(Admm {
            prior,
            projection,
            schedule,
            stop,
            state,
            prev_cost,
            trace,
        })
    }

    pub fn state(&self) -> &AdmmState {
        &self.state
    }

    pub fn trace(&self) -> &SolverTrace {
        &self.trace
    }

    /// One ADMM iteration.
    pub fn step(&mut self) -> Result<&IterationRecord> {
        let t = self.state.iter + 1;
        let lambda = self.state.lambda;
        let s = &self.state;

        let y = self.prior.prox(&s.z.sub(&s.u), lambda);
        ensure_finite(&y, "prox step", t)?;
        let z = self.projection.project(&y.add(&s.u))?;
        ensure_finite(&z, "projection step", t)?;
        let u = s.u.zip_map(&y.sub(&z), |u, r| u + r);

        let cost = self.prior.cost(&y);
        let record = IterationRecord {
            iter: t,
            lambda,
            cost,
            constraint_violation: y.distance(&z),
            cost_change: cost - self.prev_cost,
            arg_change: y.distance(&s.y),
            metrics: None,
        };
        self.prev_cost = cost;
        self.state = AdmmState {
            y,
            z,
            u,
            lambda: self.schedule.update(cost),
            iter: t,
        };
        self.trace.records.push(record);
        Ok(self.trace.last().expect("just pushed"))
    }

    pub fn is_done(&self) -> bool {
        check_stop(&self.trace, &self.stop)
    }

    /// Iterates until [`check_stop`] fires.
    pub fn run(mut self) -> Result<SolveOutput> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(SolveOutput {
            coefficients: self.state.z.clone(),
            solution: self.state.z,
            trace: self.trace,
        })
    }
}

/// Runs ADMM to convergence and returns the feasible iterate Z.
pub fn admm_solve(
    prior: &dyn ProxCost,
    projection: &dyn Projector,
    init: &PatchMatrix,
    schedule: PenaltySchedule,
    stop: StopCriteria,
) -> Result<SolveOutput> {
    Admm::new(prior, projection, init, schedule, stop)?.run()
}

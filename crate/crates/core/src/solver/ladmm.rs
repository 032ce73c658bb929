use super::admm::ensure_finite;
use super::{check_stop, IterationRecord, PenaltySchedule, Projector, ProxCost, SolveOutput, SolverTrace, StopCriteria};
use crate::error::{PacoError, Result};
use crate::patch_grid::PatchMatrix;
use crate::transforms::Dictionary;

/// Iterates of the linearized ADMM.
#[derive(Debug, Clone, PartialEq)]
pub struct LadmmState {
    /// Coefficients, `p × n`.
    pub a: PatchMatrix,
    /// `D A`, cached.
    pub da: PatchMatrix,
    /// Feasible patches, `m × n`.
    pub z: PatchMatrix,
    /// Scaled dual, `m × n`.
    pub u: PatchMatrix,
    pub lambda: f64,
    pub iter: usize,
}

/// Linearized ADMM for the synthesis model `min f(A) s.t. D A ∈ C ∩ Ω`:
///
/// ```text
/// A ← prox_{μf}(A − (μ/λ) Dᵀ(D A − Z + U))
/// Z ← Π_{C∩Ω}(D A + U)
/// U ← U + D A − Z
/// ```
///
/// The step is held as the ratio `μ/λ`, so μ follows the penalty schedule.
/// Convergence requires `μ/λ ≤ 1/‖D‖₂²`; larger ratios are rejected.
pub struct Ladmm<'a> {
    prior: &'a dyn ProxCost,
    projection: &'a dyn Projector,
    dict: &'a Dictionary,
    step_ratio: f64,
    schedule: PenaltySchedule,
    stop: StopCriteria,
    state: LadmmState,
    prev_cost: f64,
    trace: SolverTrace,
}

impl<'a> Ladmm<'a> {
    /// `step_ratio` is μ/λ; `None` picks `0.99 / ‖D‖₂²` from the
    /// dictionary's cached norm bound.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        prior: &'a dyn ProxCost,
        projection: &'a dyn Projector,
        dict: &'a Dictionary,
        init: &PatchMatrix,
        schedule: PenaltySchedule,
        stop: StopCriteria,
        step_ratio: Option<f64>,
    ) -> Result<Self> {
        let bound = dict.norm_bound();
        let max_ratio = 1.0 / (bound * bound);
        let step_ratio = step_ratio.unwrap_or(0.99 * max_ratio);
        if !(step_ratio > 0.0 && step_ratio <= max_ratio) {
            return Err(PacoError::param(format!(
                "LADMM step μ/λ = {step_ratio} outside (0, 1/‖D‖²] = (0, {max_ratio}]"
            )));
        }
        ensure_finite(init, "initial iterate", 0)?;
        let da = dict.apply(init)?;
        let z = projection.project(&da)?;
        let prev_cost = prior.cost(init);
        let trace = SolverTrace::new(schedule.alpha(), init.rows() * init.cols());
        let state = LadmmState {
            a: init.clone(),
            u: PatchMatrix::zeros(z.rows(), z.cols()),
            da,
            z,
            lambda: schedule.lambda(),
            iter: 0,
        };
        Ok(Ladmm {
            prior,
            projection,
            dict,
            step_ratio,
            schedule,
            stop,
            state,
            prev_cost,
            trace,
        })
    }

    pub fn state(&self) -> &LadmmState {
        &self.state
    }

    pub fn step_ratio(&self) -> f64 {
        self.step_ratio
    }

    pub fn step(&mut self) -> Result<&IterationRecord> {
        let t = self.state.iter + 1;
        let lambda = self.state.lambda;
        let mu = self.step_ratio * lambda;
        let s = &self.state;

        let residual = s.da.sub(&s.z).add(&s.u);
        let grad = self.dict.adjoint(&residual)?;
        let ratio = self.step_ratio;
        let a = self.prior.prox(&s.a.zip_map(&grad, |a, g| a - ratio * g), mu);
        ensure_finite(&a, "prox step", t)?;
        let da = self.dict.apply(&a)?;
        let z = self.projection.project(&da.add(&s.u))?;
        ensure_finite(&z, "projection step", t)?;
        let u = s.u.zip_map(&da.sub(&z), |u, r| u + r);

        let cost = self.prior.cost(&a);
        let record = IterationRecord {
            iter: t,
            lambda,
            cost,
            constraint_violation: da.distance(&z),
            cost_change: cost - self.prev_cost,
            arg_change: a.distance(&s.a),
            metrics: None,
        };
        self.prev_cost = cost;
        self.state = LadmmState {
            a,
            da,
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

    pub fn run(mut self) -> Result<SolveOutput> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(SolveOutput {
            solution: self.state.z,
            coefficients: self.state.a,
            trace: self.trace,
        })
    }
}

/// Runs linearized ADMM to convergence. `init` holds coefficients (`p × n`).
#[allow(clippy::too_many_arguments)]
pub fn ladmm_solve(
    prior: &dyn ProxCost,
    projection: &dyn Projector,
    dict: &Dictionary,
    init: &PatchMatrix,
    schedule: PenaltySchedule,
    stop: StopCriteria,
    step_ratio: Option<f64>,
) -> Result<SolveOutput> {
    Ladmm::new(prior, projection, dict, init, schedule, stop, step_ratio)?.run()
}

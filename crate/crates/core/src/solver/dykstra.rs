use super::Projector;
use crate::error::Result;
use crate::patch_grid::PatchMatrix;

#[derive(Debug, Clone)]
pub struct DykstraOutcome {
    /// Best available estimate of Π_{S₁∩S₂}(Y).
    pub projection: PatchMatrix,
    pub iterations: usize,
    /// ‖xₖ − xₖ₋₁‖ at the last iteration.
    pub residual: f64,
    /// False when `max_iter` ran out with the residual still above `tol`.
    pub converged: bool,
}

/// Projection onto the intersection of two closed convex sets by Dykstra's
/// alternating projections with correction terms.
pub fn dykstra_project(
    proj_1: &dyn Projector,
    proj_2: &dyn Projector,
    y: &PatchMatrix,
    max_iter: usize,
    tol: f64,
) -> Result<DykstraOutcome> {
    let mut x = y.clone();
    let mut p = PatchMatrix::zeros(y.rows(), y.cols());
    let mut q = PatchMatrix::zeros(y.rows(), y.cols());
    let mut residual = f64::INFINITY;
    for k in 1..=max_iter.max(1) {
        let w = proj_1.project(&x.add(&p))?;
        p = x.add(&p).sub(&w);
        let next = proj_2.project(&w.add(&q))?;
        q = w.add(&q).sub(&next);
        residual = next.distance(&x);
        x = next;
        if residual <= tol {
            return Ok(DykstraOutcome {
                projection: x,
                iterations: k,
                residual,
                converged: true,
            });
        }
    }
    Ok(DykstraOutcome {
        projection: x,
        iterations: max_iter.max(1),
        residual,
        converged: false,
    })
}

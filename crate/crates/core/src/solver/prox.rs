use super::{Projector, ProxCost};
use crate::error::Result;
use crate::exec;
use crate::inpaint::{soft_threshold, weighted_l1};
use crate::patch_grid::{PatchGrid, PatchMatrix, SignalConstraint};
use crate::transforms::OrthoDct;

/// f ≡ 0; its prox is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroCost;

impl ProxCost for ZeroCost {
    fn cost(&self, _y: &PatchMatrix) -> f64 {
        0.0
    }

    fn prox(&self, v: &PatchMatrix, _lambda: f64) -> PatchMatrix {
        v.clone()
    }
}

/// `f(A) = Σ_{i,j} w_i |a_ij|` with one weight per row.
#[derive(Debug, Clone)]
pub struct WeightedL1 {
    pub weights: Vec<f64>,
}

impl ProxCost for WeightedL1 {
    fn cost(&self, a: &PatchMatrix) -> f64 {
        weighted_l1(a, &self.weights)
    }

    fn prox(&self, v: &PatchMatrix, lambda: f64) -> PatchMatrix {
        soft_threshold(v, &self.weights, lambda)
    }
}

/// Weighted ℓ1 on the orthonormal DCT coefficients of each patch:
/// `f(Y) = Σ_{i,j} w_i |(D y_j)_i|`. Its prox is `Dᵀ T_{λw}(D v)`.
#[derive(Debug, Clone)]
pub struct DctWeightedL1 {
    pub dct: OrthoDct,
    pub weights: Vec<f64>,
}

impl ProxCost for DctWeightedL1 {
    fn cost(&self, y: &PatchMatrix) -> f64 {
        let a = self.dct.forward(y).expect("patch length matches the transform");
        weighted_l1(&a, &self.weights)
    }

    fn prox(&self, v: &PatchMatrix, lambda: f64) -> PatchMatrix {
        let a = self.dct.forward(v).expect("patch length matches the transform");
        let mut t = soft_threshold(&a, &self.weights, lambda);
        self.dct
            .inverse_in_place(&mut t)
            .expect("patch length matches the transform");
        t
    }
}

/// Π_{C∩Ω} over a patch grid with a signal-space constraint.
#[derive(Debug, Clone)]
pub struct ConsensusProjector<'a> {
    pub grid: &'a PatchGrid,
    pub constraint: SignalConstraint,
}

impl<'a> ConsensusProjector<'a> {
    pub fn new(grid: &'a PatchGrid, constraint: SignalConstraint) -> Self {
        ConsensusProjector { grid, constraint }
    }

    /// Plain consensus projection Π_C.
    pub fn consensus(grid: &'a PatchGrid) -> Self {
        ConsensusProjector::new(grid, SignalConstraint::none())
    }
}

impl Projector for ConsensusProjector<'_> {
    fn project(&self, y: &PatchMatrix) -> Result<PatchMatrix> {
        self.grid.project_constrained(y, &self.constraint)
    }
}

/// Projection onto the box `[lo, hi]` applied to every patch entry.
#[derive(Debug, Clone, Copy)]
pub struct BoxProjector {
    pub lo: f64,
    pub hi: f64,
}

impl Projector for BoxProjector {
    fn project(&self, y: &PatchMatrix) -> Result<PatchMatrix> {
        let mut out = y.clone();
        let rows = y.rows();
        exec::for_each_chunk(out.as_mut_slice(), rows, |_, col| {
            for v in col {
                *v = v.clamp(self.lo, self.hi);
            }
        });
        Ok(out)
    }
}

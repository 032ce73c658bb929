use crate::error::{PacoError, Result};

/// Non-increasing ADMM penalty sequence.
///
/// Starts at `λ⁽⁰⁾ = κα` and is multiplied by `shrink` after every
/// iteration whose cost exceeds the previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySchedule {
    kappa: f64,
    shrink: f64,
    alpha: f64,
    adaptive: bool,
    lambda: f64,
    last_cost: f64,
}

impl PenaltySchedule {
    pub const DEFAULT_KAPPA: f64 = 10.0;
    pub const DEFAULT_SHRINK: f64 = 0.5;

    pub fn new(kappa: f64, shrink: f64, alpha: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(PacoError::param(format!("kappa must be positive, got {kappa}")));
        }
        if !(shrink > 0.0 && shrink < 1.0) {
            return Err(PacoError::param(format!("shrink must lie in (0, 1), got {shrink}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(PacoError::param(format!("peak must be positive, got {alpha}")));
        }
        Ok(PenaltySchedule {
            kappa,
            shrink,
            alpha,
            adaptive: true,
            lambda: kappa * alpha,
            last_cost: f64::INFINITY,
        })
    }

    pub fn with_defaults(alpha: f64) -> Result<Self> {
        PenaltySchedule::new(Self::DEFAULT_KAPPA, Self::DEFAULT_SHRINK, alpha)
    }

    /// Constant `λ = κα`; `update` never changes it.
    pub fn frozen(kappa: f64, alpha: f64) -> Result<Self> {
        let mut s = PenaltySchedule::new(kappa, Self::DEFAULT_SHRINK, alpha)?;
        s.adaptive = false;
        Ok(s)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn initial_lambda(&self) -> f64 {
        self.kappa * self.alpha
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn shrink(&self) -> f64 {
        self.shrink
    }

    pub fn is_adaptive(&self) -> bool {
        self.adaptive
    }

    /// Records this iteration's cost and returns λ for the next iteration.
    pub fn update(&mut self, cost: f64) -> f64 {
        if self.adaptive && cost > self.last_cost {
            self.lambda *= self.shrink;
        }
        self.last_cost = cost;
        self.lambda
    }
}

/// Free-function form of [`PenaltySchedule::update`].
pub fn penalty_update(schedule: &mut PenaltySchedule, current_cost: f64) -> f64 {
    schedule.update(current_cost)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_value() {
        let s = PenaltySchedule::with_defaults(255.0).unwrap();
        assert_eq!(s.lambda(), 2550.0);
    }

    #[test]
    fn constant_while_decreasing() {
        let mut s = PenaltySchedule::with_defaults(1.0).unwrap();
        for t in 0..50 {
            assert_eq!(penalty_update(&mut s, 100.0 - t as f64), 10.0);
        }
    }

    #[test]
    fn halves_after_increase() {
        let mut s = PenaltySchedule::with_defaults(1.0).unwrap();
        let costs = [9.0, 8.0, 7.0, 6.0, 5.0, 5.5, 5.0];
        let lambdas: Vec<f64> = costs.iter().map(|&c| s.update(c)).collect();
        assert_eq!(lambdas, vec![10.0, 10.0, 10.0, 10.0, 10.0, 5.0, 5.0]);
    }

    #[test]
    fn frozen_never_moves() {
        let mut s = PenaltySchedule::frozen(2.0, 3.0).unwrap();
        s.update(1.0);
        assert_eq!(s.update(100.0), 6.0);
    }

    #[test]
    fn validation() {
        assert!(PenaltySchedule::new(0.0, 0.5, 1.0).is_err());
        assert!(PenaltySchedule::new(1.0, 1.0, 1.0).is_err());
        assert!(PenaltySchedule::new(1.0, 0.5, -1.0).is_err());
    }
}

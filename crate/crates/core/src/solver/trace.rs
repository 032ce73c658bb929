use std::io::{self, Write};

use crate::error::{PacoError, Result};
use crate::metrics::MetricReport;

/// Iteration limit and convergence tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCriteria {
    pub max_iter: usize,
    pub tol: f64,
}

impl StopCriteria {
    pub fn new(max_iter: usize, tol: f64) -> Result<Self> {
        if max_iter == 0 {
            return Err(PacoError::param("max_iter must be at least 1"));
        }
        if !(tol > 0.0) {
            return Err(PacoError::param(format!("tol must be positive, got {tol}")));
        }
        Ok(StopCriteria { max_iter, tol })
    }
}

/// Diagnostics of one iteration. Norms are raw Frobenius norms.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based.
    pub iter: usize,
    /// Penalty used during this iteration.
    pub lambda: f64,
    /// f(Y⁽ᵗ⁾)
    pub cost: f64,
    /// ‖Y⁽ᵗ⁾ − Z⁽ᵗ⁾‖
    pub constraint_violation: f64,
    /// f⁽ᵗ⁾ − f⁽ᵗ⁻¹⁾
    pub cost_change: f64,
    /// ‖Y⁽ᵗ⁾ − Y⁽ᵗ⁻¹⁾‖
    pub arg_change: f64,
    pub metrics: Option<MetricReport>,
}

/// Per-iteration history of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub records: Vec<IterationRecord>,
    /// Signal peak α.
    pub alpha: f64,
    /// Number of entries n·p of the primal variable.
    pub entries: usize,
}

impl SolverTrace {
    pub fn new(alpha: f64, entries: usize) -> Self {
        SolverTrace {
            records: Vec::new(),
            alpha,
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// Normalization used by the stopping rule: √(n·p)·α.
    pub fn residual_scale(&self) -> f64 {
        (self.entries.max(1) as f64).sqrt() * self.alpha
    }

    /// Writes the trace as CSV. With `scaled`, cost, violation, cost change
    /// and argument change are divided by n·p·α.
    pub fn write_csv<W: Write>(&self, mut w: W, scaled: bool) -> io::Result<()> {
        let with_metrics = self.records.iter().any(|r| r.metrics.is_some());
        write!(w, "iter,lambda,cost,constraint_violation,cost_change,arg_change")?;
        if with_metrics {
            write!(w, ",rmse,mad,bias,psnr,ssim")?;
        }
        writeln!(w)?;
        let s = if scaled {
            1.0 / (self.entries.max(1) as f64 * self.alpha)
        } else {
            1.0
        };
        for r in &self.records {
            write!(
                w,
                "{},{},{},{},{},{}",
                r.iter,
                r.lambda,
                r.cost * s,
                r.constraint_violation * s,
                r.cost_change * s,
                r.arg_change * s
            )?;
            if with_metrics {
                match &r.metrics {
                    Some(m) => write!(
                        w,
                        ",{},{},{},{},{}",
                        m.rmse,
                        m.mad,
                        m.bias,
                        m.psnr_db,
                        m.ssim.unwrap_or(f64::NAN)
                    )?,
                    None => write!(w, ",,,,,")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv(&self, scaled: bool) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, scaled).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// True when the iteration budget is spent, or when both the argument
/// change and the constraint violation, normalized by √(n·p)·α, are
/// below `tol`.
pub fn check_stop(trace: &SolverTrace, stop: &StopCriteria) -> bool {
    let Some(last) = trace.last() else {
        return false;
    };
    if last.iter >= stop.max_iter {
        return true;
    }
    let scale = trace.residual_scale();
    last.arg_change / scale < stop.tol && last.constraint_violation / scale < stop.tol
}

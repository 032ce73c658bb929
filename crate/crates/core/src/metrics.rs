//! Restoration quality metrics.
//!
//! RMSE = ‖x − x̂‖₂/√N, MAD = ‖x − x̂‖₁/N, BIAS = Σ(xᵢ − x̂ᵢ) (a raw sum,
//! not a mean), PSNR = 20 log₁₀(α/RMSE), and single-scale SSIM with an
//! 11×11 Gaussian window (σ = 1.5), K₁ = 0.01, K₂ = 0.03, averaged over
//! valid window positions.

use crate::error::{PacoError, Result};
use crate::exec;
use crate::ndsignal::{Mask, Signal};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub rmse: f64,
    pub psnr_db: f64,
    pub mad: f64,
    pub bias: f64,
    /// `None` for 1-D signals.
    pub ssim: Option<f64>,
}

impl MetricReport {
    /// All metrics of `estimate` against `reference`, using the
    /// reference's peak. SSIM is per 2-D frame, averaged over frames.
    pub fn compute(reference: &Signal, estimate: &Signal) -> Result<Self> {
        let x = reference.samples();
        let y = estimate.samples();
        check_pair(reference, estimate)?;
        let r = rmse(x, y)?;
        let ssim = match reference.ndim() {
            2 => Some(ssim(reference, estimate)?),
            3 => {
                let frames = reference.shape()[0];
                let mut total = 0.0;
                for t in 0..frames {
                    total += ssim(&reference.frame(t)?, &estimate.frame(t)?)?;
                }
                Some(total / frames as f64)
            }
            _ => None,
        };
        Ok(MetricReport {
            rmse: r,
            psnr_db: psnr(r, reference.peak()),
            mad: mad(x, y)?,
            bias: bias(x, y)?,
            ssim,
        })
    }

    /// Averages reports field by field (e.g. over color channels).
    pub fn mean(reports: &[MetricReport]) -> Option<MetricReport> {
        if reports.is_empty() {
            return None;
        }
        let n = reports.len() as f64;
        let avg = |f: fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        let ssim = reports
            .iter()
            .map(|r| r.ssim)
            .collect::<Option<Vec<f64>>>()
            .map(|v| v.iter().sum::<f64>() / n);
        Some(MetricReport {
            rmse: avg(|r| r.rmse),
            psnr_db: avg(|r| r.psnr_db),
            mad: avg(|r| r.mad),
            bias: avg(|r| r.bias),
            ssim,
        })
    }

    /// `rmse,psnr,mad,bias,ssim` with shortest round-trip formatting.
    pub fn csv_row(&self) -> String {
        let ssim = match self.ssim {
            Some(s) => format!("{s:?}"),
            None => "nan".to_string(),
        };
        format!("{},{},{},{},{}", self.rmse, self.psnr_db, self.mad, self.bias, ssim)
    }
}

fn check_pair(a: &Signal, b: &Signal) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(PacoError::shape(format!(
            "cannot compare {:?} with {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

fn check_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() || x.is_empty() {
        return Err(PacoError::shape(format!(
            "metric inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

pub fn rmse(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sse / x.len() as f64).sqrt())
}

/// RMSE restricted to the missing samples of `mask`.
pub fn rmse_missing(x: &[f64], y: &[f64], mask: &Mask) -> Result<f64> {
    check_len(x, y)?;
    if mask.len() != x.len() {
        return Err(PacoError::shape("mask length differs from signal length"));
    }
    let missing = mask.missing_indices();
    if missing.is_empty() {
        return Ok(0.0);
    }
    let sse: f64 = missing.iter().map(|&i| (x[i] - y[i]) * (x[i] - y[i])).sum();
    Ok((sse / missing.len() as f64).sqrt())
}

/// `+∞` when `rmse == 0`.
pub fn psnr(rmse: f64, peak: f64) -> f64 {
    if rmse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (peak / rmse).log10()
    }
}

pub fn mad(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum::<f64>() / x.len() as f64)
}

pub fn bias(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| a - b).sum())
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Valid-mode separable Gaussian filtering of a `h × w` image.
fn filter_valid(img: &[f64], h: usize, w: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (oh, ow) = (h - SSIM_WINDOW + 1, w - SSIM_WINDOW + 1);
    let mut rows = vec![0.0; h * ow];
    exec::for_each_chunk(&mut rows, ow, |r, out| {
        let line = &img[r * w..(r + 1) * w];
        for (c, o) in out.iter_mut().enumerate() {
            *o = k.iter().zip(&line[c..c + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    });
    let mut out = vec![0.0; oh * ow];
    exec::for_each_chunk(&mut out, ow, |r, line| {
        for (c, o) in line.iter_mut().enumerate() {
            *o = (0..SSIM_WINDOW).map(|t| k[t] * rows[(r + t) * ow + c]).sum();
        }
    });
    out
}

/// Mean SSIM of two 2-D signals of at least 11×11 samples.
pub fn ssim(x: &Signal, y: &Signal) -> Result<f64> {
    check_pair(x, y)?;
    let [h, w] = x.shape() else {
        return Err(PacoError::shape(format!(
            "SSIM needs a 2-D signal, got {:?}",
            x.shape()
        )));
    };
    let (h, w) = (*h, *w);
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(PacoError::shape(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} samples, got {h}x{w}"
        )));
    }
    let k = gaussian_window();
    let (a, b) = (x.samples(), y.samples());
    let prod = |f: fn(f64, f64) -> f64| a.iter().zip(b).map(|(&p, &q)| f(p, q)).collect::<Vec<_>>();
    let mu_x = filter_valid(a, h, w, &k);
    let mu_y = filter_valid(b, h, w, &k);
    let xx = filter_valid(&prod(|p, _| p * p), h, w, &k);
    let yy = filter_valid(&prod(|_, q| q * q), h, w, &k);
    let xy = filter_valid(&prod(|p, q| p * q), h, w, &k);
    let c1 = (SSIM_K1 * x.peak()).powi(2);
    let c2 = (SSIM_K2 * x.peak()).powi(2);
    let total: f64 = (0..mu_x.len())
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let vx = xx[i] - mx * mx;
            let vy = yy[i] - my * my;
            let cxy = xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / mu_x.len() as f64)
}

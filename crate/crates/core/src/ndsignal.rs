//! N-dimensional signals and erasure masks.
//!
//! Samples are stored as `f64` in row-major order (last axis fastest).
//! Every linear index used elsewhere in the crate refers to this order.

use crate::error::{PacoError, Result};

/// A real-valued N-dimensional signal with its dynamic-range peak.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    shape: Vec<usize>,
    samples: Vec<f64>,
    peak: f64,
}

impl Signal {
    pub fn new(shape: Vec<usize>, samples: Vec<f64>, peak: f64) -> Result<Self> {
        validate_shape(&shape)?;
        let n: usize = shape.iter().product();
        if samples.len() != n {
            return Err(PacoError::shape(format!(
                "{} samples for shape {:?} ({} expected)",
                samples.len(),
                shape,
                n
            )));
        }
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(PacoError::param(format!("peak must be positive, got {peak}")));
        }
        Ok(Signal {
            shape,
            samples,
            peak,
        })
    }

    pub fn zeros(shape: Vec<usize>, peak: f64) -> Result<Self> {
        let n = shape.iter().product();
        Signal::new(shape, vec![0.0; n], peak)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    /// Same shape and peak, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Signal::new(self.shape.clone(), samples, self.peak)
    }

    /// Slice along the first axis: frame `t` of a 3-D signal, row of a 2-D one.
    pub fn frame(&self, t: usize) -> Result<Signal> {
        if self.shape.len() < 2 || t >= self.shape[0] {
            return Err(PacoError::shape(format!(
                "frame {t} out of range for shape {:?}",
                self.shape
            )));
        }
        let len: usize = self.shape[1..].iter().product();
        Signal::new(
            self.shape[1..].to_vec(),
            self.samples[t * len..(t + 1) * len].to_vec(),
            self.peak,
        )
    }
}

/// Row-major flattening.
pub fn vectorize(s: &Signal) -> Vec<f64> {
    s.samples.clone()
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &[f64], shape: &[usize], peak: f64) -> Result<Signal> {
    Signal::new(shape.to_vec(), v.to_vec(), peak)
}

/// Per-sample observed/missing indicator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    shape: Vec<usize>,
    known: Vec<bool>,
}

impl Mask {
    pub fn new(shape: Vec<usize>, known: Vec<bool>) -> Result<Self> {
        validate_shape(&shape)?;
        let n: usize = shape.iter().product();
        if known.len() != n {
            return Err(PacoError::shape(format!(
                "mask has {} entries for shape {:?}",
                known.len(),
                shape
            )));
        }
        Ok(Mask { shape, known })
    }

    pub fn all_known(shape: Vec<usize>) -> Result<Self> {
        let n = shape.iter().product();
        Mask::new(shape, vec![true; n])
    }

    /// Decodes erasure bytes: `0` is an observed sample, anything else is missing.
    pub fn from_bytes(shape: Vec<usize>, bytes: &[u8]) -> Result<Self> {
        Mask::new(shape, bytes.iter().map(|&b| b == 0).collect())
    }

    /// Encodes as erasure bytes, `0` observed and `255` missing.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.known.iter().map(|&k| if k { 0 } else { 255 }).collect()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn known(&self) -> &[bool] {
        &self.known
    }

    pub fn is_known(&self, i: usize) -> bool {
        self.known[i]
    }

    pub fn len(&self) -> usize {
        self.known.len()
    }

    pub fn is_empty(&self) -> bool {
        self.known.is_empty()
    }

    /// The observed index set O.
    pub fn known_indices(&self) -> Vec<usize> {
        (0..self.known.len()).filter(|&i| self.known[i]).collect()
    }

    /// The missing index set Oᶜ.
    pub fn missing_indices(&self) -> Vec<usize> {
        (0..self.known.len()).filter(|&i| !self.known[i]).collect()
    }

    pub fn missing_count(&self) -> usize {
        self.known.iter().filter(|&&k| !k).count()
    }

    pub fn check_shape(&self, shape: &[usize]) -> Result<()> {
        if self.shape != shape {
            return Err(PacoError::shape(format!(
                "mask shape {:?} does not match signal shape {:?}",
                self.shape, shape
            )));
        }
        Ok(())
    }

    pub fn frame(&self, t: usize) -> Result<Mask> {
        if self.shape.len() < 2 || t >= self.shape[0] {
            return Err(PacoError::shape(format!(
                "frame {t} out of range for mask shape {:?}",
                self.shape
            )));
        }
        let len: usize = self.shape[1..].iter().product();
        Mask::new(
            self.shape[1..].to_vec(),
            self.known[t * len..(t + 1) * len].to_vec(),
        )
    }
}

fn validate_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(PacoError::shape(format!(
            "shape {shape:?} must have at least one axis and positive extents"
        )));
    }
    Ok(())
}

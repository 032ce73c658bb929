//! File formats: PGM/PPM images, PCM16 WAV audio, frame directories and
//! erasure masks.
//!
//! Samples are real-valued in memory; quantization happens only when saving
//! (round half away from zero, then clamp).

use std::fs;
use std::path::Path;

use crate::error::{PacoError, Result};
use crate::ndsignal::Mask;

pub mod frames;
pub mod pnm;
pub mod wav;

pub use frames::{load_frames, save_frames};
pub use pnm::{load_image, save_image};
pub use wav::{load_audio, save_audio, Audio};

pub(crate) fn quantize(v: f64, peak: f64) -> f64 {
    v.round().clamp(0.0, peak)
}

/// Loads an erasure mask for a signal of `shape`.
///
/// Accepted sources: a P5 file of the same 2-D shape, a directory of P5
/// frames for a 3-D shape, or a raw file with one byte per sample. Zero
/// bytes are observed samples, nonzero bytes are missing.
pub fn load_mask(path: impl AsRef<Path>, shape: &[usize]) -> Result<Mask> {
    let path = path.as_ref();
    if path.is_dir() {
        let stacked = frames::load_frames(path)?;
        if stacked.len() != 1 {
            return Err(PacoError::format(path, "mask frames must be grayscale"));
        }
        return mask_from_levels(stacked[0].samples(), stacked[0].shape(), shape, path);
    }
    let bytes = fs::read(path).map_err(|e| PacoError::io(path, e))?;
    if bytes.starts_with(b"P5") {
        let img = pnm::decode(&bytes, path)?;
        let levels: Vec<f64> = img.data.iter().map(|&b| f64::from(b)).collect();
        return mask_from_levels(&levels, &[img.height, img.width], shape, path);
    }
    let n: usize = shape.iter().product();
    if bytes.len() != n {
        return Err(PacoError::shape(format!(
            "{}: {} mask bytes for {} samples",
            path.display(),
            bytes.len(),
            n
        )));
    }
    Mask::from_bytes(shape.to_vec(), &bytes)
}

fn mask_from_levels(levels: &[f64], found: &[usize], shape: &[usize], path: &Path) -> Result<Mask> {
    if found != shape {
        return Err(PacoError::shape(format!(
            "{}: mask is {:?}, signal is {:?}",
            path.display(),
            found,
            shape
        )));
    }
    Mask::new(shape.to_vec(), levels.iter().map(|&v| v == 0.0).collect())
}

/// Writes a mask as P5 (2-D), a frame directory (3-D) or raw bytes (1-D).
pub fn save_mask(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = mask.to_bytes();
    match mask.shape() {
        [h, w] => {
            let img = pnm::Pnm {
                width: *w,
                height: *h,
                channels: 1,
                data: bytes,
            };
            fs::write(path, pnm::encode(&img)).map_err(|e| PacoError::io(path, e))
        }
        [t, h, w] => {
            fs::create_dir_all(path).map_err(|e| PacoError::io(path, e))?;
            let len = h * w;
            for k in 0..*t {
                let img = pnm::Pnm {
                    width: *w,
                    height: *h,
                    channels: 1,
                    data: bytes[k * len..(k + 1) * len].to_vec(),
                };
                let file = path.join(format!("mask{k:04}.pgm"));
                fs::write(&file, pnm::encode(&img)).map_err(|e| PacoError::io(&file, e))?;
            }
            Ok(())
        }
        _ => fs::write(path, bytes).map_err(|e| PacoError::io(path, e)),
    }
}

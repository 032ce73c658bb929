//! Numbered frame directories (`name0000.pgm`, `name0001.pgm`, ...).

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{PacoError, Result};
use crate::ndsignal::Signal;

use super::pnm;

/// Lists `(number, path)` for every `.pgm`/`.ppm` file in `dir` whose stem
/// ends in digits, sorted by number. Numbering must be contiguous.
pub fn list_frames(dir: &Path) -> Result<Vec<(u64, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| PacoError::io(dir, e))?;
    let mut frames = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| PacoError::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if !matches!(ext, "pgm" | "ppm") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        let digits: String = stem
            .chars()
            .rev()
            .take_while(|c| c.is_ascii_digit())
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect();
        if let Ok(n) = digits.parse::<u64>() {
            frames.push((n, path));
        }
    }
    frames.sort();
    if frames.is_empty() {
        return Err(PacoError::format(dir, "no numbered frames"));
    }
    for w in frames.windows(2) {
        if w[1].0 != w[0].0 + 1 {
            return Err(PacoError::format(
                dir,
                format!("frame numbering jumps from {} to {}", w[0].0, w[1].0),
            ));
        }
    }
    Ok(frames)
}

/// Stacks frames into one `[T, H, W]` signal per channel.
pub fn load_frames(dir: impl AsRef<Path>) -> Result<Vec<Signal>> {
    let dir = dir.as_ref();
    let frames = list_frames(dir)?;
    let mut channels: Vec<Vec<f64>> = Vec::new();
    let mut frame_shape: Option<(Vec<usize>, usize)> = None;
    for (_, path) in &frames {
        let sigs = pnm::load_image(path)?;
        let shape = sigs[0].shape().to_vec();
        match &frame_shape {
            None => {
                channels = vec![Vec::new(); sigs.len()];
                frame_shape = Some((shape, sigs.len()));
            }
            Some((s, c)) if *s != shape || *c != sigs.len() => {
                return Err(PacoError::format(
                    path,
                    format!(
                        "frame is {:?}x{} but earlier frames are {:?}x{}",
                        shape,
                        sigs.len(),
                        s,
                        c
                    ),
                ));
            }
            Some(_) => {}
        }
        for (buf, sig) in channels.iter_mut().zip(sigs) {
            buf.extend(sig.into_samples());
        }
    }
    let (shape, _) = frame_shape.expect("at least one frame");
    channels
        .into_iter()
        .map(|samples| Signal::new(vec![frames.len(), shape[0], shape[1]], samples, 255.0))
        .collect()
}

/// Writes `<dir>/<prefix>NNNN.pgm` (or `.ppm` for three channels).
pub fn save_frames(channels: &[Signal], dir: impl AsRef<Path>, prefix: &str) -> Result<()> {
    let dir = dir.as_ref();
    let shape = channels
        .first()
        .ok_or_else(|| PacoError::shape("no channels"))?
        .shape()
        .to_vec();
    if shape.len() != 3 {
        return Err(PacoError::shape("frame stacks must be 3-D"));
    }
    fs::create_dir_all(dir).map_err(|e| PacoError::io(dir, e))?;
    let ext = if channels.len() == 3 { "ppm" } else { "pgm" };
    for t in 0..shape[0] {
        let frame: Vec<Signal> = channels
            .iter()
            .map(|c| c.frame(t))
            .collect::<Result<_>>()?;
        pnm::save_image(&frame, dir.join(format!("{prefix}{t:04}.{ext}")))?;
    }
    Ok(())
}

//! Seeded erasure-mask generators.
//!
//! All generators draw from a ChaCha8 stream seeded by the caller, so a
//! given seed yields the same mask on every platform and thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{PacoError, Result};
use crate::ndsignal::Mask;

/// Random erasures in a 1-D signal.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioErasures {
    pub mask: Mask,
    /// `(start, length)` of every placed fragment, in start order. Fragments
    /// may overlap and may be cut short by the end of the signal.
    pub fragments: Vec<(usize, usize)>,
}

fn reject_full(mask: Mask) -> Result<Mask> {
    if mask.known().iter().all(|k| !k) {
        return Err(PacoError::param("mask erases every sample"));
    }
    Ok(mask)
}

/// Erasures starting at each sample with probability `rate`, with
/// geometrically distributed lengths of mean `mean_len` (at least 1).
pub fn audio_erasures(len: usize, rate: f64, mean_len: f64, seed: u64) -> Result<AudioErasures> {
    if len == 0 {
        return Err(PacoError::param("signal length must be positive"));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(PacoError::param(format!("erasure rate must lie in (0, 1], got {rate}")));
    }
    if !(mean_len >= 1.0 && mean_len.is_finite()) {
        return Err(PacoError::param(format!("mean erasure length must be at least 1, got {mean_len}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaps = Geometric::new(rate).map_err(|e| PacoError::param(e.to_string()))?;
    let lengths = Geometric::new(1.0 / mean_len).map_err(|e| PacoError::param(e.to_string()))?;
    let mut known = vec![true; len];
    let mut fragments = Vec::new();
    let mut pos = gaps.sample(&mut rng);
    while pos < len as u64 {
        let start = pos as usize;
        let n = (1 + lengths.sample(&mut rng)).min((len - start) as u64) as usize;
        known[start..start + n].iter_mut().for_each(|k| *k = false);
        fragments.push((start, n));
        pos += 1 + gaps.sample(&mut rng);
    }
    let mask = reject_full(Mask::new(vec![len], known)?)?;
    Ok(AudioErasures { mask, fragments })
}

/// A `height × width` hole with top-left corner `(top, left)`.
pub fn rectangle(shape: [usize; 2], top: usize, left: usize, height: usize, width: usize) -> Result<Mask> {
    let [h, w] = shape;
    if height == 0 || width == 0 || top + height > h || left + width > w {
        return Err(PacoError::param(format!(
            "rectangle {height}x{width} at ({top}, {left}) does not fit in {h}x{w}"
        )));
    }
    let mut known = vec![true; h * w];
    for r in top..top + height {
        known[r * w + left..r * w + left + width].iter_mut().for_each(|k| *k = false);
    }
    reject_full(Mask::new(vec![h, w], known)?)
}

/// `count` straight strokes of the given `thickness` with random position,
/// direction and a length between a quarter and the whole image diagonal.
pub fn scratches(shape: [usize; 2], count: usize, thickness: usize, seed: u64) -> Result<Mask> {
    let [h, w] = shape;
    if h == 0 || w == 0 || thickness == 0 {
        return Err(PacoError::param("scratch masks need a non-empty image and thickness"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag = ((h * h + w * w) as f64).sqrt();
    let half = thickness as f64 / 2.0;
    let mut known = vec![true; h * w];
    for _ in 0..count {
        let (r0, c0) = (rng.random_range(0.0..h as f64), rng.random_range(0.0..w as f64));
        let angle = rng.random_range(0.0..std::f64::consts::PI);
        let length = rng.random_range(0.25 * diag..=diag);
        let (dr, dc) = (angle.sin(), angle.cos());
        let steps = (length * 2.0).ceil() as usize;
        for s in 0..=steps {
            let t = s as f64 / 2.0;
            let (r, c) = (r0 + t * dr, c0 + t * dc);
            mark_disc(&mut known, h, w, r, c, half);
        }
    }
    reject_full(Mask::new(vec![h, w], known)?)
}

fn mark_disc(known: &mut [bool], h: usize, w: usize, r: f64, c: f64, half: f64) {
    let rlo = (r - half).floor().max(0.0) as usize;
    let clo = (c - half).floor().max(0.0) as usize;
    let rhi = ((r + half).ceil() as usize).min(h);
    let chi = ((c + half).ceil() as usize).min(w);
    for rr in rlo..rhi {
        for cc in clo..chi {
            let (dy, dx) = (rr as f64 + 0.5 - r, cc as f64 + 0.5 - c);
            if dy * dy + dx * dx <= (half + 0.25) * (half + 0.25) {
                known[rr * w + cc] = false;
            }
        }
    }
}

/// Film-style vertical scratches on a `[frames, height, width]` video: each
/// scratch spans the full height, persists over all frames, and drifts by
/// at most one column per frame.
pub fn video_scratches(shape: [usize; 3], count: usize, width: usize, seed: u64) -> Result<Mask> {
    let [t, h, w] = shape;
    if t == 0 || h == 0 || width == 0 || width > w {
        return Err(PacoError::param(format!(
            "scratch width {width} does not fit a {t}x{h}x{w} video"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut known = vec![true; t * h * w];
    let max_left = (w - width) as i64;
    for _ in 0..count {
        let mut left = rng.random_range(0..=max_left);
        for f in 0..t {
            for r in 0..h {
                let base = (f * h + r) * w + left as usize;
                known[base..base + width].iter_mut().for_each(|k| *k = false);
            }
            left = (left + rng.random_range(-1..=1)).clamp(0, max_left);
        }
    }
    reject_full(Mask::new(vec![t, h, w], known)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_counts() {
        let m = rectangle([64, 64], 4, 4, 8, 8).unwrap();
        assert_eq!(m.missing_count(), 64);
        assert!(!m.is_known(4 * 64 + 4) && m.is_known(3 * 64 + 4));
        assert!(rectangle([64, 64], 60, 0, 8, 8).is_err());
        assert!(rectangle([4, 4], 0, 0, 4, 4).is_err());
    }

    #[test]
    fn audio_is_reproducible_and_rejects_full_erasure() {
        let a = audio_erasures(50_000, 1e-3, 50.0, 3).unwrap();
        let b = audio_erasures(50_000, 1e-3, 50.0, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.mask, audio_erasures(50_000, 1e-3, 50.0, 4).unwrap().mask);
        assert!(audio_erasures(100, 1.0, 1000.0, 0).is_err());
        assert!(audio_erasures(100, 0.0, 10.0, 0).is_err());
        assert!(audio_erasures(100, 0.1, 0.5, 0).is_err());
    }

    #[test]
    fn audio_fragments_match_mask() {
        let a = audio_erasures(20_000, 2e-3, 20.0, 9).unwrap();
        let mut known = vec![true; 20_000];
        for &(s, n) in &a.fragments {
            assert!(n >= 1);
            known[s..s + n].iter_mut().for_each(|k| *k = false);
        }
        assert_eq!(known, a.mask.known());
        assert!(a.fragments.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn scratches_are_thin_and_seeded() {
        let m = scratches([64, 64], 3, 2, 1).unwrap();
        assert_eq!(m, scratches([64, 64], 3, 2, 1).unwrap());
        let frac = m.missing_count() as f64 / 4096.0;
        assert!(frac > 0.0 && frac < 0.25, "{frac}");
    }

    #[test]
    fn video_scratches_cover_full_height() {
        let m = video_scratches([5, 16, 32], 2, 2, 7).unwrap();
        for f in 0..5 {
            let frame = m.frame(f).unwrap();
            let missing_per_row: Vec<usize> = (0..16)
                .map(|r| (0..32).filter(|&c| !frame.is_known(r * 32 + c)).count())
                .collect();
            assert!(missing_per_row.iter().all(|&n| n == missing_per_row[0] && n >= 2));
        }
    }
}

//! RIFF/WAVE, 16-bit PCM mono.

use std::fs;
use std::path::Path;

use crate::error::{PacoError, Result};
use crate::ndsignal::Signal;

/// Peak value of 16-bit PCM.
pub const PCM16_PEAK: f64 = 32768.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Audio {
    pub signal: Signal,
    /// Carried through to the output file; the solver never looks at it.
    pub sample_rate: u32,
}

fn u16_at(b: &[u8], i: usize) -> u16 {
    u16::from_le_bytes([b[i], b[i + 1]])
}

fn u32_at(b: &[u8], i: usize) -> u32 {
    u32::from_le_bytes([b[i], b[i + 1], b[i + 2], b[i + 3]])
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<Audio> {
    let err = |reason: &str| PacoError::format(path, reason);
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(err("not a RIFF/WAVE file"));
    }
    let mut pos = 12;
    let mut format: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        if body + size > bytes.len() {
            return Err(err("truncated chunk"));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(err("short fmt chunk"));
                }
                format = Some((
                    u16_at(bytes, body),
                    u16_at(bytes, body + 2),
                    u32_at(bytes, body + 4),
                    u16_at(bytes, body + 14),
                ));
            }
            b"data" => data = Some(&bytes[body..body + size]),
            _ => {}
        }
        // chunks are word aligned
        pos = body + size + (size & 1);
    }
    let (codec, channels, sample_rate, bits) = format.ok_or_else(|| err("missing fmt chunk"))?;
    if codec != 1 {
        return Err(err(&format!("codec {codec} is not PCM")));
    }
    if channels != 1 {
        return Err(err(&format!("{channels} channels; only mono is supported")));
    }
    if bits != 16 {
        return Err(err(&format!("{bits}-bit samples; only 16-bit is supported")));
    }
    let data = data.ok_or_else(|| err("missing data chunk"))?;
    if data.len() % 2 != 0 {
        return Err(err("odd data chunk length"));
    }
    let samples: Vec<f64> = data
        .chunks_exact(2)
        .map(|c| f64::from(i16::from_le_bytes([c[0], c[1]])))
        .collect();
    if samples.is_empty() {
        return Err(err("no samples"));
    }
    let signal = Signal::new(vec![samples.len()], samples, PCM16_PEAK)?;
    Ok(Audio {
        signal,
        sample_rate,
    })
}

/// Rounds half away from zero and clamps to the i16 range.
pub fn quantize_pcm16(v: f64) -> i16 {
    v.round().clamp(-32768.0, 32767.0) as i16
}

pub fn encode(audio: &Audio) -> Result<Vec<u8>> {
    if audio.signal.ndim() != 1 {
        return Err(PacoError::shape("audio signals must be 1-D"));
    }
    let n = audio.signal.len();
    let data_len = (n * 2) as u32;
    let mut out = Vec::with_capacity(44 + n * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&audio.sample_rate.to_le_bytes());
    out.extend_from_slice(&(audio.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &v in audio.signal.samples() {
        out.extend_from_slice(&quantize_pcm16(v).to_le_bytes());
    }
    Ok(out)
}

pub fn load_audio(path: impl AsRef<Path>) -> Result<Audio> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| PacoError::io(path, e))?;
    decode(&bytes, path)
}

pub fn save_audio(audio: &Audio, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(audio)?).map_err(|e| PacoError::io(path, e))
}

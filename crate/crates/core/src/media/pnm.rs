//! Binary PGM (P5) and PPM (P6), 8-bit only.

use std::fs;
use std::path::Path;

use crate::error::{PacoError, Result};
use crate::ndsignal::Signal;

use super::quantize;

const PEAK: f64 = 255.0;

/// Decoded netpbm raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Pnm {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

/// Parses a P5/P6 byte stream. `path` only labels errors.
pub fn decode(bytes: &[u8], path: &Path) -> Result<Pnm> {
    let err = |reason: &str| PacoError::format(path, reason);
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(err("not a netpbm file"));
    }
    let channels = match bytes[1] {
        b'5' => 1,
        b'6' => 3,
        _ => return Err(err("only binary P5/P6 is supported")),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        skip_space_and_comments(bytes, &mut pos);
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(err("malformed header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err("malformed header"))?;
    }
    // exactly one whitespace byte separates maxval from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(err("malformed header"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(err("zero image dimension"));
    }
    if maxval != 255 {
        return Err(err(&format!("maxval {maxval} unsupported (255 required)")));
    }
    let len = width * height * channels;
    if bytes.len() - pos < len {
        return Err(err("truncated payload"));
    }
    Ok(Pnm {
        width,
        height,
        channels,
        data: bytes[pos..pos + len].to_vec(),
    })
}

fn skip_space_and_comments(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        if bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        } else if bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
}

pub fn encode(pnm: &Pnm) -> Vec<u8> {
    let magic = if pnm.channels == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", pnm.width, pnm.height).into_bytes();
    out.extend_from_slice(&pnm.data);
    out
}

impl Pnm {
    /// One `[height, width]` signal per channel.
    pub fn to_signals(&self) -> Vec<Signal> {
        (0..self.channels)
            .map(|c| {
                let samples = self
                    .data
                    .iter()
                    .skip(c)
                    .step_by(self.channels)
                    .map(|&b| f64::from(b))
                    .collect();
                Signal::new(vec![self.height, self.width], samples, PEAK)
                    .expect("raster length matches header")
            })
            .collect()
    }

    pub fn from_signals(channels: &[Signal]) -> Result<Pnm> {
        if channels.len() != 1 && channels.len() != 3 {
            return Err(PacoError::shape(format!(
                "{} channels; images need 1 or 3",
                channels.len()
            )));
        }
        let shape = channels[0].shape();
        if shape.len() != 2 || channels.iter().any(|c| c.shape() != shape) {
            return Err(PacoError::shape(
                "image channels must be 2-D and share one shape",
            ));
        }
        let (height, width) = (shape[0], shape[1]);
        let nc = channels.len();
        let mut data = vec![0u8; height * width * nc];
        for (c, sig) in channels.iter().enumerate() {
            for (i, &v) in sig.samples().iter().enumerate() {
                data[i * nc + c] = quantize(v, PEAK) as u8;
            }
        }
        Ok(Pnm {
            width,
            height,
            channels: nc,
            data,
        })
    }
}

/// Loads a P5 or P6 file as one signal per channel (peak 255).
pub fn load_image(path: impl AsRef<Path>) -> Result<Vec<Signal>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| PacoError::io(path, e))?;
    Ok(decode(&bytes, path)?.to_signals())
}

/// Saves one channel as P5 or three as P6, rounding and clamping to `[0, 255]`.
pub fn save_image(channels: &[Signal], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let pnm = Pnm::from_signals(channels)?;
    fs::write(path, encode(&pnm)).map_err(|e| PacoError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> &Path {
        Path::new(s)
    }

    #[test]
    fn single_pixel_pgm() {
        let img = decode(b"P5\n1 1\n255\n\x80", p("x")).unwrap();
        let s = img.to_signals();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].shape(), &[1, 1]);
        assert_eq!(s[0].samples(), &[128.0]);
        assert_eq!(s[0].peak(), 255.0);
    }

    #[test]
    fn ppm_splits_channels() {
        let img = decode(b"P6 2 1 255\n\xff\x00\x00\x00\xff\x00", p("x")).unwrap();
        let s = img.to_signals();
        assert_eq!(s[0].samples(), &[255.0, 0.0]);
        assert_eq!(s[1].samples(), &[0.0, 255.0]);
        assert_eq!(s[2].samples(), &[0.0, 0.0]);
    }

    #[test]
    fn header_comments_are_skipped() {
        let img = decode(b"P5\n# made by hand\n2 1\n# c\n255\n\x01\x02", p("x")).unwrap();
        assert_eq!(img.data, vec![1, 2]);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(decode(b"P2\n1 1\n255\n0", p("x")).is_err());
        assert!(decode(b"P5\n1 x\n255\n\x00", p("x")).is_err());
        assert!(decode(b"P5\n2 2\n255\n\x00\x00\x00", p("x")).is_err());
        let e = decode(b"P5\n1 1\n65535\n\x00\x00", p("x")).unwrap_err();
        assert!(e.to_string().contains("maxval"));
    }

    #[test]
    fn encode_decode_roundtrip() {
        let img = Pnm {
            width: 3,
            height: 2,
            channels: 3,
            data: (0..18).map(|i| (i * 13) as u8).collect(),
        };
        assert_eq!(decode(&encode(&img), p("x")).unwrap(), img);
        let back = Pnm::from_signals(&img.to_signals()).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn save_quantizes() {
        let s = Signal::new(vec![1, 4], vec![-3.0, 12.5, 254.49, 300.0], 255.0).unwrap();
        let pnm = Pnm::from_signals(&[s]).unwrap();
        assert_eq!(pnm.data, vec![0, 13, 254, 255]);
    }
}

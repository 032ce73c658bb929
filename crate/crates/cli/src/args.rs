use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "paco", version, about = "Patch-consensus inpainting of images, audio and video")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inpaint a PGM/PPM image.
    InpaintImage(InpaintArgs),
    /// Inpaint a mono 16-bit PCM WAV file.
    InpaintAudio(InpaintArgs),
    /// Inpaint a directory of numbered PGM/PPM frames.
    InpaintVideo(InpaintArgs),
    /// Print `rmse,psnr,mad,bias,ssim` of an estimate against a reference.
    Metrics(MetricsArgs),
    /// Write a seeded erasure mask.
    MaskGen(MaskGenArgs),
}

#[derive(Debug, Args)]
pub struct InpaintArgs {
    /// Degraded input.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Erasure mask: nonzero marks a missing sample.
    #[arg(short, long)]
    pub mask: PathBuf,
    /// Restored output.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Patch extents per axis; a single value applies to every axis.
    #[arg(long, value_parser = parse_list::<usize>)]
    pub patch: Option<List<usize>>,
    /// Strides per axis; a single value applies to every axis.
    #[arg(long, value_parser = parse_list::<usize>)]
    pub stride: Option<List<usize>>,
    #[arg(long, default_value_t = 10.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.5)]
    pub shrink: f64,
    /// Defaults to 256 for images and video, 1024 for audio.
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Clamp restored samples to `lo,hi`.
    #[arg(long, value_parser = parse_list::<f64>)]
    pub clip: Option<List<f64>>,
    /// Update every patch on every iteration.
    #[arg(long)]
    pub no_partial: bool,
    /// Keep λ fixed at κα instead of halving it when the cost rises.
    #[arg(long)]
    pub fixed_lambda: bool,
    /// Write the per-iteration trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Ground truth for per-iteration metrics in the trace.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Ground truth.
    pub reference: PathBuf,
    /// Estimate to score.
    pub estimate: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaskKind {
    /// Random erasures in a 1-D signal (raw byte mask).
    Audio,
    /// One rectangular hole in an image (P5).
    Rectangle,
    /// Random straight strokes in an image (P5).
    Scratches,
    /// Drifting vertical scratches through a frame stack (P5 frames).
    VideoScratches,
}

#[derive(Debug, Args)]
pub struct MaskGenArgs {
    #[arg(long, value_enum)]
    pub kind: MaskKind,
    /// Signal shape: `N`, `H,W` or `T,H,W`.
    #[arg(long, value_parser = parse_list::<usize>)]
    pub shape: List<usize>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Erasure starts per sample (audio).
    #[arg(long, default_value_t = 1e-4)]
    pub rate: f64,
    /// Mean erasure length in samples (audio).
    #[arg(long, default_value_t = 1000.0)]
    pub mean_len: f64,
    /// `top,left,height,width` (rectangle).
    #[arg(long, value_parser = parse_list::<usize>)]
    pub rect: Option<List<usize>>,
    /// Number of scratches.
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    /// Scratch thickness in pixels.
    #[arg(long, default_value_t = 2)]
    pub width: usize,
}

/// A comma-separated list argument.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

fn parse_list<T: FromStr + Clone + Send + Sync + 'static>(s: &str) -> Result<List<T>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| format!("`{p}` is not a valid number"))
        })
        .collect::<Result<Vec<T>, String>>()
        .map(List)
}

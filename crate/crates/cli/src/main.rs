//! `paco` command-line front-end.
//!
//! Exit codes: 0 success, 2 usage or inconsistent inputs, 3 I/O or file
//! format, 4 solver abort.

mod args;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use paco::media::{self, Audio};
use paco::solver::IterationRecord;
use paco::{inpaint_traced, maskgen, InpaintConfig, Mask, MetricReport, PacoError, Signal, SolverTrace};

use args::{Cli, Command, InpaintArgs, MaskGenArgs, MaskKind, MetricsArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Media {
    Image,
    Audio,
    Video,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("paco: {}: {e}", module_of(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn module_of(e: &PacoError) -> &'static str {
    match e {
        PacoError::Io { .. } | PacoError::Format { .. } => "media",
        PacoError::Shape(_) | PacoError::InvalidParameter(_) => "config",
        PacoError::NoCompletePatches => "inpaint",
        PacoError::NonFinite { .. } => "solver",
    }
}

fn exit_code(e: &PacoError) -> u8 {
    match e {
        PacoError::Shape(_) | PacoError::InvalidParameter(_) => 2,
        PacoError::Io { .. } | PacoError::Format { .. } => 3,
        PacoError::NoCompletePatches | PacoError::NonFinite { .. } => 4,
    }
}

fn run(command: Command) -> paco::Result<()> {
    match command {
        Command::InpaintImage(a) => inpaint_media(Media::Image, &a),
        Command::InpaintAudio(a) => inpaint_media(Media::Audio, &a),
        Command::InpaintVideo(a) => inpaint_media(Media::Video, &a),
        Command::Metrics(a) => metrics(&a),
        Command::MaskGen(a) => mask_gen(&a),
    }
}

/// Channels of an image, audio file or frame directory, plus the WAV rate.
fn load(kind: Media, path: &Path) -> paco::Result<(Vec<Signal>, Option<u32>)> {
    Ok(match kind {
        Media::Image => (media::load_image(path)?, None),
        Media::Video => (media::load_frames(path)?, None),
        Media::Audio => {
            let a = media::load_audio(path)?;
            (vec![a.signal], Some(a.sample_rate))
        }
    })
}

fn save(kind: Media, channels: Vec<Signal>, rate: Option<u32>, path: &Path) -> paco::Result<()> {
    match kind {
        Media::Image => media::save_image(&channels, path),
        Media::Video => media::save_frames(&channels, path, "frame"),
        Media::Audio => {
            let signal = channels.into_iter().next().expect("audio has one channel");
            let sample_rate = rate.expect("audio keeps its sample rate");
            media::save_audio(&Audio { signal, sample_rate }, path)
        }
    }
}

fn detect(path: &Path) -> Media {
    if path.is_dir() {
        Media::Video
    } else if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"))
    {
        Media::Audio
    } else {
        Media::Image
    }
}

fn per_axis(values: &[usize], ndim: usize, what: &str) -> paco::Result<Vec<usize>> {
    match values.len() {
        1 => Ok(vec![values[0]; ndim]),
        n if n == ndim => Ok(values.to_vec()),
        n => Err(PacoError::InvalidParameter(format!(
            "--{what} has {n} values for a {ndim}-D signal"
        ))),
    }
}

fn config(kind: Media, a: &InpaintArgs, ndim: usize) -> paco::Result<InpaintConfig> {
    let mut cfg = match kind {
        Media::Image => InpaintConfig::image(),
        Media::Audio => InpaintConfig::audio(),
        Media::Video => InpaintConfig::video(),
    };
    if let Some(p) = &a.patch {
        cfg.patch_shape = per_axis(&p.0, ndim, "patch")?;
    }
    if let Some(s) = &a.stride {
        cfg.strides = per_axis(&s.0, ndim, "stride")?;
    }
    cfg.kappa = a.kappa;
    cfg.shrink = a.shrink;
    cfg.tol = a.tol;
    cfg.partial_updates = !a.no_partial;
    cfg.adaptive_penalty = !a.fixed_lambda;
    if let Some(m) = a.max_iter {
        cfg.max_iter = m;
    }
    if let Some(c) = &a.clip {
        let [lo, hi] = c.0[..] else {
            return Err(PacoError::InvalidParameter("--clip takes lo,hi".into()));
        };
        cfg.clip = Some((lo, hi));
    }
    Ok(cfg)
}

fn inpaint_media(kind: Media, a: &InpaintArgs) -> paco::Result<()> {
    let (channels, rate) = load(kind, &a.input)?;
    let shape = channels[0].shape().to_vec();
    let mask = media::load_mask(&a.mask, &shape)?;
    let cfg = config(kind, a, shape.len())?;
    let reference = match &a.reference {
        Some(p) => {
            let (r, _) = load(kind, p)?;
            if r.len() != channels.len() {
                return Err(PacoError::Shape(format!(
                    "reference has {} channels, input has {}",
                    r.len(),
                    channels.len()
                )));
            }
            Some(r)
        }
        None => None,
    };

    let mut restored = Vec::with_capacity(channels.len());
    let mut traces = Vec::with_capacity(channels.len());
    for (c, channel) in channels.iter().enumerate() {
        let r = reference.as_ref().map(|r| &r[c]);
        let out = inpaint_traced(channel, &mask, &cfg, r)?;
        restored.push(out.signal);
        traces.push(out.trace);
    }
    save(kind, restored, rate, &a.output)?;
    if let Some(path) = &a.trace {
        let csv = merge_traces(&traces).to_csv(true);
        fs::write(path, csv).map_err(|e| PacoError::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    Ok(())
}

/// Averages channel traces record by record. Channels that stopped early
/// drop out of later averages.
fn merge_traces(traces: &[SolverTrace]) -> SolverTrace {
    if traces.len() == 1 {
        return traces[0].clone();
    }
    let mut merged = SolverTrace::new(traces[0].alpha, traces[0].entries);
    let longest = traces.iter().map(SolverTrace::len).max().unwrap_or(0);
    for t in 0..longest {
        let recs: Vec<&IterationRecord> = traces.iter().filter_map(|tr| tr.records.get(t)).collect();
        let n = recs.len() as f64;
        let avg = |f: fn(&IterationRecord) -> f64| recs.iter().map(|r| f(r)).sum::<f64>() / n;
        let metrics: Option<Vec<MetricReport>> = recs.iter().map(|r| r.metrics.clone()).collect();
        merged.records.push(IterationRecord {
            iter: t + 1,
            lambda: avg(|r| r.lambda),
            cost: avg(|r| r.cost),
            constraint_violation: avg(|r| r.constraint_violation),
            cost_change: avg(|r| r.cost_change),
            arg_change: avg(|r| r.arg_change),
            metrics: metrics.and_then(|m| MetricReport::mean(&m)),
        });
    }
    merged
}

fn metrics(a: &MetricsArgs) -> paco::Result<()> {
    let kind = detect(&a.reference);
    let (reference, _) = load(kind, &a.reference)?;
    let (estimate, _) = load(kind, &a.estimate)?;
    if reference.len() != estimate.len() {
        return Err(PacoError::Shape(format!(
            "reference has {} channels, estimate has {}",
            reference.len(),
            estimate.len()
        )));
    }
    let reports = reference
        .iter()
        .zip(&estimate)
        .map(|(r, e)| MetricReport::compute(r, e))
        .collect::<paco::Result<Vec<_>>>()?;
    let report = MetricReport::mean(&reports).expect("at least one channel");
    println!("{}", report.csv_row());
    Ok(())
}

fn mask_gen(a: &MaskGenArgs) -> paco::Result<()> {
    let shape = &a.shape.0;
    let dims = |n: usize| -> paco::Result<()> {
        if shape.len() != n {
            return Err(PacoError::InvalidParameter(format!(
                "{:?} masks need a {n}-D --shape, got {shape:?}",
                a.kind
            )));
        }
        Ok(())
    };
    let mask: Mask = match a.kind {
        MaskKind::Audio => {
            dims(1)?;
            maskgen::audio_erasures(shape[0], a.rate, a.mean_len, a.seed)?.mask
        }
        MaskKind::Rectangle => {
            dims(2)?;
            let r = a
                .rect
                .as_ref()
                .ok_or_else(|| PacoError::InvalidParameter("rectangle masks need --rect".into()))?;
            let [top, left, h, w] = r.0[..] else {
                return Err(PacoError::InvalidParameter("--rect takes top,left,height,width".into()));
            };
            maskgen::rectangle([shape[0], shape[1]], top, left, h, w)?
        }
        MaskKind::Scratches => {
            dims(2)?;
            maskgen::scratches([shape[0], shape[1]], a.count, a.width, a.seed)?
        }
        MaskKind::VideoScratches => {
            dims(3)?;
            maskgen::video_scratches([shape[0], shape[1], shape[2]], a.count, a.width, a.seed)?
        }
    };
    media::save_mask(&mask, &a.output)
}
